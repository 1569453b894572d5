"""Closed-form bifurcation curves, fixed points and the period-6 trace polynomial."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DenominatorVanishes, DomainError
from ..maps import MapInstance, Point2
from ..maps.core import B_FLOOR, DENOMINATOR_FLOOR
from ..orbits import Orbit, make_orbit

# Tr(x) = 2 + 24x + 116x^2 + 128x^3 - 96x^4 - 128x^5 + 64x^6, low degree first
TRACE_COEFFS = (2.0, 24.0, 116.0, 128.0, -96.0, -128.0, 64.0)


def _check_b(b: float) -> None:
    if abs(b) < B_FLOOR:
        raise DomainError(f"|b| must be at least {B_FLOOR:g}")


def curve_F(b: float, mu: float) -> float:
    """Fold curve of the symmetric fixed points of T2mu: 4(1 + b mu) M = -(b - 1)^2."""
    _check_b(b)
    den = 4.0 * (1.0 + b * mu)
    if abs(den) < DENOMINATOR_FLOOR:
        raise DenominatorVanishes("1 + b*mu vanishes on the fold curve")
    return -((b - 1.0) ** 2) / den + 0.0  # no negative zero at b = 1


def curve_PF(b: float, mu: float) -> float:
    """Pitchfork curve of T2mu: 4M = (3 + b mu)(b - 1)^2."""
    _check_b(b)
    return (3.0 + b * mu) * (b - 1.0) ** 2 / 4.0


def curve_name(kind: str, b: float) -> str:
    """Label of a curve branch: index 1 for b < 0, 2 for b > 0."""
    return f"{kind}{1 if b < 0 else 2}"


@dataclass(frozen=True)
class T2muFixedPoints:
    symmetric: tuple
    asymmetric: tuple  # (M1, M2) when D > 0, else empty
    D: float
    J1: float | None
    J2: float | None


def t2mu_symmetric_fixed_points(b: float, M: float, mu: float) -> tuple:
    """Fixed points on x = y: roots of (1 + b mu) x^2 - (b - 1) x - M = 0."""
    _check_b(b)
    a, c1, c0 = 1.0 + b * mu, -(b - 1.0), -M
    if abs(a) < DENOMINATOR_FLOOR:
        if abs(c1) < DENOMINATOR_FLOOR:
            return ()
        x = -c0 / c1
        return (Point2(x, x),)
    disc = c1 * c1 - 4 * a * c0
    if disc < 0:
        return ()
    r = math.sqrt(disc)
    xs = sorted({(-c1 - r) / (2 * a), (-c1 + r) / (2 * a)})
    return tuple(Point2(x, x) for x in xs)


def t2mu_discriminant(b: float, M: float, mu: float) -> float:
    den = 4.0 * (1.0 - b * mu)
    if abs(den) < DENOMINATOR_FLOOR:
        raise DenominatorVanishes("1 - b*mu vanishes")
    return (4.0 * M - (1.0 - b) ** 2 * (3.0 + b * mu)) / den


def t2mu_fixed_points(b: float, M: float, mu: float) -> T2muFixedPoints:
    """Symmetric fixed points and the asymmetric couple (M1, M2) of T2mu.

    The couple satisfies x + y = 1 - b and exists when ``D > 0``; its
    Jacobians are returned in closed form.
    """
    _check_b(b)
    D = t2mu_discriminant(b, M, mu)
    sym = t2mu_symmetric_fixed_points(b, M, mu)
    if D <= 0:
        return T2muFixedPoints(sym, (), D, None, None)
    c, s = (1.0 - b) / 2.0, math.sqrt(D)
    bm = b * mu
    d1 = 2.0 + bm * (1.0 - b + 2.0 * s)
    d2 = 2.0 + bm * (1.0 - b - 2.0 * s)
    if min(abs(d1), abs(d2)) < DENOMINATOR_FLOOR:
        raise DenominatorVanishes("Jacobian denominator of the asymmetric fixed points vanishes")
    J1 = 1.0 - 4.0 * bm * s / d1
    J2 = 1.0 + 4.0 * bm * s / d2
    return T2muFixedPoints(sym, (Point2(c + s, c - s), Point2(c - s, c + s)), D, J1, J2)


@dataclass(frozen=True)
class Hm1muFixedPoints:
    S1: Point2
    S2: Point2
    J1: float
    J2: float
    a: float


def _hm1mu_domain(M: float, mu: float) -> None:
    if not M > 0:
        raise DomainError("the fixed points S1, S2 exist only for M > 0")
    if not 1.0 + 2.0 * mu > 0:
        raise DomainError("need 1 + 2 mu > 0")


def hm1mu_fixed_points(M: float, mu: float) -> Hm1muFixedPoints:
    """The couple S1 = (-a, a), S2 = (a, -a), a = sqrt(M / (1 + 2 mu)), with Jacobians."""
    _hm1mu_domain(M, mu)
    a = math.sqrt(M / (1.0 + 2.0 * mu))
    r, sm = math.sqrt(1.0 + 2.0 * mu), math.sqrt(M)
    d1, d2 = r - mu * sm, r + mu * sm
    if min(abs(d1), abs(d2)) < DENOMINATOR_FLOOR:
        raise DenominatorVanishes("Jacobian denominator at S1/S2 vanishes")
    J1 = -1.0 - 2.0 * mu * sm / d1
    J2 = -1.0 + 2.0 * mu * sm / d2
    return Hm1muFixedPoints(Point2(-a, a), Point2(a, -a), J1, J2, a)


def hm1mu_two_orbit(M: float, mu: float) -> tuple:
    """Symmetric 2-cycle (u, u) <-> (-u, -u) of Hm1mu, u = sqrt(M / (1 - 2 mu))."""
    if not M > 0:
        raise DomainError("the symmetric 2-cycle exists only for M > 0")
    if not 1.0 - 2.0 * mu > 0:
        raise DomainError("need 1 - 2 mu > 0")
    u = math.sqrt(M / (1.0 - 2.0 * mu))
    return (Point2(u, u), Point2(-u, -u))


def _sqrt_clip(v: float, what: str) -> float:
    if v < -1e-12:
        raise DomainError(what)
    return math.sqrt(max(v, 0.0))


def symmetric_period6_ys(M: float, branch: int) -> np.ndarray:
    """y-coordinates of the two symmetric period-6 families of x' = y, y' = -x + M - y^2.

    Branch 1 exists for M >= 5/4 and branch 2 for M >= -3/4; both follow the
    pattern y1 = y6, y2 = y5, y3 = y4 with y1 + y3 = -1 and y2^2 = M + 1.
    """
    if branch not in (1, 2):
        raise DomainError("branch must be 1 or 2")
    if M < -1:
        raise DomainError("symmetric period-6 orbits need M >= -1")
    q = math.sqrt(M + 1.0)
    sign = 1.0 if branch == 1 else -1.0
    inner = _sqrt_clip(1.0 - sign * 4.0 * q + 4.0 * M,
                       f"branch {branch} symmetric period-6 orbit does not exist at M={M:g}")
    y1 = (-1.0 - sign * inner) / 2.0
    y2 = sign * q
    y3 = -1.0 - y1
    return np.array([y1, y2, y3, y3, y2, y1])


def symmetric_period6_closed_form(M: float, branch: int) -> Orbit:
    """Closed-form symmetric period-6 orbit as an :class:`Orbit` of the area-preserving map.

    Points are ``(y_{i-1}, y_i)``.  At the birth parameter the six points
    collapse onto a shorter cycle; the result is still returned so that the
    degeneracy can be inspected.
    """
    ys = symmetric_period6_ys(M, branch)
    pts = np.column_stack([np.roll(ys, 1), ys])
    return make_orbit(MapInstance.henon(M), pts)


def trace_polynomial(x):
    """Expanded trace polynomial of the branch-1 symmetric 6-cycle, x = sqrt(M + 1)."""
    return np.polynomial.polynomial.polyval(x, TRACE_COEFFS)


def trace_polynomial_factored(x):
    """Factored form 2 + 4x(2x + 1)^3(2x - 3)(x - 2)."""
    x = np.asarray(x, dtype=float)
    return 2.0 + 4.0 * x * (2.0 * x + 1.0) ** 3 * (2.0 * x - 3.0) * (x - 2.0)


def trace_level_parameters(level: float) -> np.ndarray:
    """Parameters M >= 5/4 where the trace polynomial equals ``level`` (x = sqrt(M + 1))."""
    c = np.array(TRACE_COEFFS)
    c[0] -= level
    roots = np.polynomial.polynomial.polyroots(c)
    xs = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
    Ms = xs[xs >= 1.5 - 1e-9] ** 2 - 1.0
    return Ms


def x_of_M(M: float) -> float:
    if M < -1:
        raise DomainError("x = sqrt(M + 1) needs M >= -1")
    return math.sqrt(M + 1.0)
