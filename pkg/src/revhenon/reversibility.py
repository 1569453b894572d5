"""The involution h(x, y) = (y, x) and symmetry classification of orbits."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .maps import DEFAULT_CONFIG, MapInstance, Point2, SolverConfig, as_point, step_many

SET_TOL = 1e-8


class InvolutionKind(enum.Enum):
    SWAP_XY = "swap"


class SymmetryKind(enum.Enum):
    SYMMETRIC = "symmetric"
    COUPLE_MEMBER = "couple"
    ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class SymmetryClass:
    kind: SymmetryKind
    partner: int | None = None  # index into the ``known`` list for couple members

    def __str__(self):
        if self.kind is SymmetryKind.COUPLE_MEMBER:
            return f"couple(partner={self.partner})"
        return self.kind.value


SYMMETRIC = SymmetryClass(SymmetryKind.SYMMETRIC)
ASYMMETRIC = SymmetryClass(SymmetryKind.ASYMMETRIC)


def apply_involution(p) -> Point2:
    """h(x, y) = (y, x)."""
    x, y = p
    return Point2(y, x)


def apply_involution_array(z):
    """h on an array of points with trailing axis of length 2."""
    return np.asarray(z, dtype=float)[..., ::-1]


def on_fix_line(p, tol: float = SET_TOL) -> bool:
    x, y = p
    return abs(x - y) <= tol


def reversibility_residual_array(m: MapInstance, x, y, cfg: SolverConfig = DEFAULT_CONFIG):
    """Element-wise ``|step(p) - h(step_inverse(h(p)))|`` in the max-norm."""
    X, Y = step_many(m, x, y, cfg)
    a, b = step_many(m, y, x, cfg, inverse=True)
    # h(a, b) = (b, a)
    return np.maximum(np.abs(X - b), np.abs(Y - a))


def reversibility_residual(m: MapInstance, p, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Max-norm defect of the identity f = h o f^-1 o h at ``p``."""
    p = as_point(p)
    return float(reversibility_residual_array(m, p.x, p.y, cfg))


def _points(orbit) -> np.ndarray:
    pts = orbit.points if hasattr(orbit, "points") else orbit
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def reflect_points(points) -> np.ndarray:
    """h-image of an orbit, reordered so that it again follows the dynamics.

    If ``z_0 -> z_1 -> ...`` is an orbit of a reversible map, then
    ``h(z_{n-1}) -> h(z_{n-2}) -> ...`` is one too.
    """
    return apply_involution_array(_points(points))[::-1].copy()


def same_cycle(a, b, tol: float = SET_TOL) -> bool:
    """True when two point sequences agree up to a cyclic shift."""
    a, b = _points(a), _points(b)
    if a.shape != b.shape:
        return False
    for k in range(len(a)):
        if np.max(np.abs(np.roll(b, -k, axis=0) - a)) <= tol:
            return True
    return False


def same_point_set(a, b, tol: float = SET_TOL) -> bool:
    """True when every point of ``a`` has a partner in ``b`` and vice versa."""
    a, b = _points(a), _points(b)
    if a.shape != b.shape:
        return False
    d = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=-1)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def classify_symmetry(orbit, known=(), tol: float = SET_TOL) -> SymmetryClass:
    """Symmetric, member of a symmetric couple (partner index into ``known``) or asymmetric."""
    pts = _points(orbit)
    image = reflect_points(pts)
    if same_point_set(image, pts, tol):
        return SYMMETRIC
    for i, other in enumerate(known):
        if other is orbit:
            continue
        if same_point_set(image, _points(other), tol):
            return SymmetryClass(SymmetryKind.COUPLE_MEMBER, i)
    return ASYMMETRIC


def classify_all(orbits, tol: float = SET_TOL) -> list[SymmetryClass]:
    """Classify every orbit of a list against the others."""
    return [classify_symmetry(o, orbits, tol) for o in orbits]


def fix_counts(orbit, tol: float = SET_TOL) -> tuple[int, int]:
    """Points of a cycle on Fix(h), and steps ``z_{i-1} -> z_i`` exchanged by h.

    A symmetric orbit meets the symmetry line in its points or in the
    midpoints of its steps; the two counts always add up to 2 for a
    symmetric orbit of a reversible map (one point plus one step for odd
    periods).
    """
    pts = _points(orbit)
    on_line = int(np.sum(np.abs(pts[:, 0] - pts[:, 1]) <= tol))
    prev = np.roll(pts, 1, axis=0)
    swapped = int(np.sum(np.max(np.abs(apply_involution_array(pts) - prev), axis=1) <= tol))
    if len(pts) == 1:
        swapped = on_line
    return on_line, swapped
