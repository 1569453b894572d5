"""Reference orbit data for x' = y, y' = -x + M - y^2 and its perturbation Hp1mu.

Coordinates are listed as y-sequences; a cycle's points are
``(y_{i-1}, y_i)``.
"""
from __future__ import annotations

import numpy as np

# asymmetric period-6 orbit at M = 4 (its h-image is the partner orbit)
O6_M = 4.0
O6_YS_MU0 = (2.114907541, -1.935432332, -1.860805853, 2.472833909, -0.254101688, 1.462598423)
O6_YS_MU001 = (2.107429699, -1.911473368, -1.833980679, 2.460965013, -0.2062196180, 1.423687035)
O6_MU = 0.01
O6_CYCLE_JACOBIAN_MU001 = 0.9999999555

# symmetric parabolic period-5 orbit
P5_M = 5.5517
P5_YS = (-2.243751084, -2.243751084, 2.761032157, 0.172152512, 2.761032157)

# period-doubling parameters of the branch-1 symmetric 6-cycle
PD_M2 = 1.2813
PD_M3 = 2.98038
PITCHFORK_M = 3.0
O6_BIRTH_M = 1.25


def points_from_ys(ys) -> np.ndarray:
    """Cycle points ``(y_{i-1}, y_i)`` from a y-sequence."""
    ys = np.asarray(ys, dtype=float)
    return np.column_stack([np.roll(ys, 1), ys])
