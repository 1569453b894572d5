"""Smooth invariant densities of QRexample1 maps with a separable perturbation.

For ``y' = -x + F(y) - e1(x, y) - e1(y', x')`` with ``e1(u, v) = p(u) + q(v)``
the Jacobian is ``(1 + v(x)) / (1 + v(y'))`` with ``v = p'``, and the density
``rho(x, y) = (1 + v(x)) (1 + v(y))`` is a fixed point of the transfer
operator ``rho -> (rho o f^-1) / |J o f^-1|``.

The alternative form ``(1 + v(y)) (1 + v(y'))`` is kept as ``form="image"``
for comparison; it satisfies the identity only with the Jacobian evaluated
at the image point, not at the preimage.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .maps import DEFAULT_CONFIG, Family, MapInstance, SolverConfig, as_point, jacobian_array, step_many

FORMS = ("invariant", "image")


@dataclass(frozen=True)
class DensitySpec:
    """Density built from ``v`` (coefficients, low degree first)."""

    v: tuple = (0.0,)
    form: str = "invariant"

    def __post_init__(self):
        if self.form not in FORMS:
            raise DomainError(f"density form must be one of {FORMS}")
        object.__setattr__(self, "v", tuple(float(c) for c in self.v) or (0.0,))

    @classmethod
    def from_map(cls, m: MapInstance, form: str = "invariant") -> "DensitySpec":
        """Take ``v = p'`` from the first component of the map's perturbation."""
        if m.family is not Family.QR_EXAMPLE1:
            raise DomainError("invariant densities are provided for QRexample1 maps only")
        return cls(tuple(m.eps.first_component_derivative()), form)

    def factor(self, u):
        return 1.0 + P.polyval(u, np.asarray(self.v))

    def is_positive(self, radius: float = 2.0, samples: int = 401) -> bool:
        u = np.linspace(-radius, radius, samples)
        return bool(np.all(self.factor(u) > 0))


def density_array(m: MapInstance, spec: DensitySpec, x, y, cfg: SolverConfig = DEFAULT_CONFIG):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spec.form == "invariant":
        return spec.factor(x) * spec.factor(y)
    _, Y = step_many(m, x, y, cfg)
    return spec.factor(y) * spec.factor(Y)


def density(m: MapInstance, spec: DensitySpec, p, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Density at ``p``."""
    p = as_point(p)
    return float(density_array(m, spec, p.x, p.y, cfg))


def transfer_residual_array(m: MapInstance, spec: DensitySpec, x, y, cfg: SolverConfig = DEFAULT_CONFIG):
    """``|rho(p) - rho(q) / |J(q)||`` with ``q = f^-1(p)``, element-wise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    qx, qy = step_many(m, x, y, cfg, inverse=True)
    J = jacobian_array(m, qx, qy, x, y)
    return np.abs(density_array(m, spec, x, y, cfg) - density_array(m, spec, qx, qy, cfg) / np.abs(J))


def transfer_residual(m: MapInstance, spec: DensitySpec, p, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Defect of the transfer-operator fixed-point identity at ``p``."""
    p = as_point(p)
    return float(transfer_residual_array(m, spec, p.x, p.y, cfg))
