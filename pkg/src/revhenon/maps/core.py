"""Map instances and the public stepping / Jacobian API."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from ..errors import DenominatorVanishes, DomainError
from .families import CROSS_FORM, KERNELS, NAMED, NEEDS_B, NONORIENTABLE, Family
from .polynomials import ZERO, Nonlinearity, NonlinearityKind, Perturbation
from .solver import DEFAULT_CONFIG, SolverConfig, raise_for_status

B_FLOOR = 1e-6
DENOMINATOR_FLOOR = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    x, y = (float(c) for c in p)
    if not (np.isfinite(x) and np.isfinite(y)):
        raise DomainError(f"point {p!r} has a non-finite coordinate")
    return Point2(x, y)


@dataclass(frozen=True)
class MapInstance:
    """One member of the map catalog.

    Parameters
    ----------
    family : Family
        Base family of the map.
    nonlinearity : Nonlinearity
        The function F.  Named families (``T2mu``, ``Hm1mu``, ``Hp1mu``)
        fix its kind and take ``M`` from it.
    b : float
        Jacobian parameter of ``TildeH12inv`` and ``T2mu``; ignored otherwise.
    mu : float
        Perturbation size of the named families.
    eps, eps2 : Perturbation
        Free perturbations of the generic families.  ``eps`` plays the role of
        the first QR perturbation and ``eps2`` of the second one.
    strict : bool
        When false, skip the evenness check of the nonorientable family
        (useful for negative controls).
    """

    family: Family
    nonlinearity: Nonlinearity
    b: float = 1.0
    mu: float = 0.0
    eps: Perturbation = ZERO
    eps2: Perturbation = ZERO
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family.parse(str(self.family)))
        f = self.family
        for name in ("b", "mu"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if f in NEEDS_B and abs(self.b) < B_FLOOR:
            raise DomainError(f"{f.value} needs |b| >= {B_FLOOR:g}, got b={self.b:g}")
        if f is Family.T2MU or f is Family.HP1MU:
            if self.nonlinearity.kind is not NonlinearityKind.QUADRATIC_MINUS:
                raise DomainError(f"{f.value} uses F(y) = M - y^2")
        if f is Family.HM1MU and self.nonlinearity.kind is not NonlinearityKind.QUADRATIC_PLUS:
            raise DomainError("Hm1mu uses F(y) = -M + y^2")
        if f in NONORIENTABLE and self.strict and not self.nonlinearity.is_even():
            raise DomainError("the nonorientable family is reversible only for even F")
        if f in NAMED and not (self.eps.is_zero and self.eps2.is_zero):
            raise DomainError(f"{f.value} takes its perturbation from mu, not eps")

    # named constructors -------------------------------------------------
    @classmethod
    def henon(cls, M: float) -> "MapInstance":
        """Area-preserving map x' = y, y' = -x + M - y^2."""
        return cls(Family.CONSERVATIVE_H, Nonlinearity.quadratic_minus(M))

    @classmethod
    def t2mu(cls, M: float, b: float, mu: float) -> "MapInstance":
        return cls(Family.T2MU, Nonlinearity.quadratic_minus(M), b=b, mu=mu)

    @classmethod
    def hm1mu(cls, M: float, mu: float) -> "MapInstance":
        return cls(Family.HM1MU, Nonlinearity.quadratic_plus(M), mu=mu)

    @classmethod
    def hp1mu(cls, M: float, mu: float) -> "MapInstance":
        return cls(Family.HP1MU, Nonlinearity.quadratic_minus(M), mu=mu)

    # parameters -----------------------------------------------------------
    @property
    def F(self) -> Nonlinearity:
        return self.nonlinearity

    @property
    def M(self) -> float:
        return self.nonlinearity.M

    @property
    def sigma(self) -> float:
        """Determinant of the unperturbed map: +1 or -1."""
        return KERNELS[self.family].sigma

    @property
    def is_cross_form(self) -> bool:
        return self.family in CROSS_FORM

    @property
    def eps_eff(self) -> Perturbation:
        """Perturbation actually entering the equations."""
        f, mu = self.family, self.mu
        if f is Family.T2MU or f is Family.HM1MU:
            return Perturbation.bivariate({(1, 1): mu})
        if f is Family.HP1MU:
            return Perturbation.bivariate({(1, 1): mu, (2, 0): mu})
        return self.eps

    @property
    def eps2_eff(self) -> Perturbation:
        return self.eps2

    def with_param(self, name: str, value: float) -> "MapInstance":
        """Copy with one of ``M``, ``b``, ``mu`` replaced."""
        if name == "M":
            return replace(self, nonlinearity=self.nonlinearity.with_M(value))
        if name in ("b", "mu"):
            return replace(self, **{name: float(value)})
        raise DomainError(f"unknown parameter {name!r}; use M, b or mu")

    def param(self, name: str) -> float:
        if name == "M":
            if not self.nonlinearity.has_parameter:
                raise DomainError("a generic polynomial nonlinearity has no parameter M")
            return self.M
        if name in ("b", "mu"):
            return getattr(self, name)
        raise DomainError(f"unknown parameter {name!r}; use M, b or mu")

    def unperturbed(self) -> "MapInstance":
        return replace(self, mu=0.0, eps=ZERO, eps2=ZERO)


# array API --------------------------------------------------------------

def step_array(m: MapInstance, x, y, cfg: SolverConfig = DEFAULT_CONFIG, inverse: bool = False):
    """Vectorised step; returns ``(X, Y, status)`` without raising."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = KERNELS[m.family]
    return k.backward(m, x, y, cfg) if inverse else k.forward(m, x, y, cfg)


def step_many(m: MapInstance, x, y, cfg: SolverConfig = DEFAULT_CONFIG, inverse: bool = False):
    """Vectorised step that raises on any failed element."""
    X, Y, status = step_array(m, x, y, cfg, inverse)
    raise_for_status(status, "inverse step" if inverse else "step", cfg)
    return X, Y


def residual_array(m: MapInstance, x, y, X, Y):
    """Max-norm of the defining equations at ``(x, y) -> (X, Y)``."""
    r1, r2 = KERNELS[m.family].equations(m, x, y, X, Y)
    return np.maximum(np.abs(r1), np.abs(r2))


def differential_array(m: MapInstance, x, y, X, Y):
    """Differential of the step, shape ``(..., 2, 2)``, via implicit differentiation."""
    A, B = KERNELS[m.family].partials(m, x, y, X, Y)
    detB = B[..., 0, 0] * B[..., 1, 1] - B[..., 0, 1] * B[..., 1, 0]
    if np.any(np.abs(detB) < DENOMINATOR_FLOOR):
        raise DenominatorVanishes("implicit equations are degenerate in the image variables")
    Binv = np.empty_like(B)
    Binv[..., 0, 0] = B[..., 1, 1]
    Binv[..., 1, 1] = B[..., 0, 0]
    Binv[..., 0, 1] = -B[..., 0, 1]
    Binv[..., 1, 0] = -B[..., 1, 0]
    Binv /= detB[..., None, None]
    return -Binv @ A


def jacobian_array(m: MapInstance, x, y, X, Y):
    """Closed-form determinant of the differential, vectorised."""
    num, den = KERNELS[m.family].jacobian(m, x, y, X, Y)
    num, den = np.broadcast_arrays(np.asarray(num, dtype=float), np.asarray(den, dtype=float))
    if np.any(np.abs(den) < DENOMINATOR_FLOOR):
        raise DenominatorVanishes("Jacobian formula denominator is below 1e-12")
    return num / den


# point API ---------------------------------------------------------------

def step(m: MapInstance, p, cfg: SolverConfig = DEFAULT_CONFIG) -> Point2:
    """Image of ``p`` under the map."""
    p = as_point(p)
    X, Y = step_many(m, p.x, p.y, cfg)
    return Point2(float(X), float(Y))


def step_inverse(m: MapInstance, p, cfg: SolverConfig = DEFAULT_CONFIG) -> Point2:
    """Preimage of ``p``."""
    p = as_point(p)
    x, y = step_many(m, p.x, p.y, cfg, inverse=True)
    return Point2(float(x), float(y))


def differential(m: MapInstance, p, image=None, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    p = as_point(p)
    image = step(m, p, cfg) if image is None else as_point(image)
    return differential_array(m, p.x, p.y, image.x, image.y)


def jacobian_analytic(m: MapInstance, p, image=None, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Determinant of the differential at ``p`` from the family's closed form.

    ``image`` should be ``step(m, p)``; it is computed when omitted.
    """
    p = as_point(p)
    image = step(m, p, cfg) if image is None else as_point(image)
    return float(jacobian_array(m, p.x, p.y, image.x, image.y))


def jacobian_fd(m: MapInstance, p, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Central-difference differential of ``step`` at ``p`` (2x2 matrix)."""
    p = as_point(p)
    h = cfg.fd_step
    xs = np.array([p.x + h, p.x - h, p.x, p.x])
    ys = np.array([p.y, p.y, p.y + h, p.y - h])
    X, Y = step_many(m, xs, ys, cfg)
    return np.array(
        [
            [(X[0] - X[1]) / (2 * h), (X[2] - X[3]) / (2 * h)],
            [(Y[0] - Y[1]) / (2 * h), (Y[2] - Y[3]) / (2 * h)],
        ]
    )


def sample_domain(m: MapInstance, n: int, radius: float = 2.0, rng=None,
                  cfg: SolverConfig = DEFAULT_CONFIG, max_rounds: int = 50):
    """Draw ``n`` uniform points of ``|x|, |y| <= radius`` where the map is defined.

    A point is kept when the forward step, the inverse step and the inverse
    step at its mirror image ``(y, x)`` all converge.  Returns ``(x, y, tried)``
    with ``tried`` the number of candidates drawn.
    """
    rng = np.random.default_rng(rng)
    xs, ys, tried = [], [], 0
    for _ in range(max_rounds):
        need = n - sum(len(a) for a in xs)
        if need <= 0:
            break
        k = max(2 * need, 16)
        x, y = rng.uniform(-radius, radius, (2, k))
        tried += k
        ok = step_array(m, x, y, cfg)[2] == 0
        ok &= step_array(m, x, y, cfg, inverse=True)[2] == 0
        ok &= step_array(m, y, x, cfg, inverse=True)[2] == 0
        xs.append(x[ok])
        ys.append(y[ok])
    x, y = np.concatenate(xs)[:n], np.concatenate(ys)[:n]
    if len(x) < n:
        raise DomainError(f"could not find {n} points of the box where the map is defined")
    return x, y, tried


def cross_form_factor(m: MapInstance, a, b, anchor=None):
    """Shared scalar function whose swapped evaluations form a cross-form Jacobian.

    For a cross-form map the Jacobian at ``p = (x, y)`` with image ``(X, Y)`` is
    ``cross_form_factor(m, x, Y) / cross_form_factor(m, Y, x)``.  For
    ``CrossFormTildeH`` the factor also depends on ``F'`` at ``anchor = y - eps(Y, x)``.
    """
    if not m.is_cross_form:
        raise DomainError(f"{m.family.value} is not a cross-form map")
    return KERNELS[m.family].cross_factor(m, a, b, anchor)
