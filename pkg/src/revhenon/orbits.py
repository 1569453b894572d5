"""Periodic orbits: multi-point Newton, multipliers, stability and brute-force search."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoConvergence, NonPrimitive, SingularNewtonMatrix
from .maps import (
    DEFAULT_CONFIG,
    MapInstance,
    Point2,
    SolverConfig,
    differential_array,
    jacobian_array,
    step_array,
)
from .maps.families import KERNELS
from .reversibility import ASYMMETRIC, SymmetryClass, classify_all, classify_symmetry

DEDUP_TOL = 1e-6
PRIMITIVE_TOL = 1e-8
_RCOND_FLOOR = 1e-15
# step-map mismatch above this means Newton found another root of the implicit equations
_STEP_GUARD = 1e-8
# accepted residual when rounding stops Newton from making progress
_FLOOR_FACTOR = 1000.0


class Stability(enum.Enum):
    ELLIPTIC = "elliptic"
    SADDLE = "saddle"
    SINK = "sink"
    SOURCE = "source"
    PARABOLIC = "parabolic"
    NONORIENTABLE_SADDLE = "nonorientable-saddle"


class Multipliers(NamedTuple):
    trace: float
    det: float
    eigvals: tuple


@dataclass(frozen=True)
class SearchBox:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    grid: int = 200

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("search box needs x_min < x_max and y_min < y_max")
        if int(self.grid) < 1:
            raise DomainError("grid must be a positive integer")

    @classmethod
    def square(cls, radius: float, grid: int = 200, center=(0.0, 0.0)) -> "SearchBox":
        cx, cy = center
        return cls(cx - radius, cx + radius, cy - radius, cy + radius, grid)

    def points(self):
        xs = np.linspace(self.x_min, self.x_max, self.grid)
        ys = np.linspace(self.y_min, self.y_max, self.grid)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return X.ravel(), Y.ravel()


@dataclass(frozen=True)
class Orbit:
    """A periodic orbit with its linear data.

    ``trace`` and ``eigvals`` refer to the differential of the ``period``-th
    iterate at ``points[0]``; ``cycle_det`` is the product of the closed-form
    per-step Jacobians; ``residual`` is the max-norm of the defining
    equations along the cycle.
    """

    period: int
    points: tuple
    residual: float
    trace: float
    cycle_det: float
    eigvals: tuple
    stability: Stability
    symmetry: SymmetryClass = ASYMMETRIC

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    @property
    def ys(self) -> np.ndarray:
        return self.array[:, 1]

    def with_symmetry(self, symmetry: SymmetryClass) -> "Orbit":
        return Orbit(self.period, self.points, self.residual, self.trace, self.cycle_det,
                     self.eigvals, self.stability, symmetry)

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "points": [[p.x, p.y] for p in self.points],
            "residual": self.residual,
            "trace": self.trace,
            "det": self.cycle_det,
            "cycle_jacobian": self.cycle_det,
            "eigvals": [[complex(v).real, complex(v).imag] for v in self.eigvals],
            "stability": self.stability.value,
            "symmetry": self.symmetry.kind.value,
            "partner": self.symmetry.partner,
        }


# linear algebra along a cycle ----------------------------------------------

def _eig_from(trace: float, det: float) -> tuple:
    disc = complex(trace * trace - 4.0 * det)
    r = np.sqrt(disc)
    lam = ((trace + r) / 2, (trace - r) / 2)
    return tuple(complex(v) for v in lam)


def classify_stability(trace: float, det: float, tol_parabolic: float = 1e-8,
                       tol_det: float = 1e-9) -> Stability:
    """Stability type from the trace and determinant of a 2x2 monodromy matrix."""
    lam = _eig_from(trace, det)
    disc = trace * trace - 4.0 * det
    real = disc >= 0
    near_unit = real and any(min(abs(v.real - 1), abs(v.real + 1)) <= tol_parabolic for v in lam)
    if abs(det + 1.0) <= tol_det:
        return Stability.PARABOLIC if near_unit else Stability.NONORIENTABLE_SADDLE
    if abs(det - 1.0) <= tol_det and (abs(disc) <= tol_parabolic or near_unit):
        return Stability.PARABOLIC
    if near_unit:
        return Stability.PARABOLIC
    if abs(det - 1.0) <= tol_det:
        return Stability.ELLIPTIC if abs(trace) < 2 else Stability.SADDLE
    mods = sorted(abs(v) for v in lam)
    if mods[1] < 1:
        return Stability.SINK
    if mods[0] > 1:
        return Stability.SOURCE
    return Stability.SADDLE


def _images(pts):
    return np.roll(pts, -1, axis=0)


def monodromy(m: MapInstance, points) -> np.ndarray:
    """Chained differential of the cycle started at ``points[0]``."""
    pts = np.asarray(points, dtype=float)
    nxt = _images(pts)
    D = differential_array(m, pts[:, 0], pts[:, 1], nxt[:, 0], nxt[:, 1])
    out = np.eye(2)
    for Di in D:
        out = Di @ out
    return out


def step_dets(m: MapInstance, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    nxt = _images(pts)
    return jacobian_array(m, pts[:, 0], pts[:, 1], nxt[:, 0], nxt[:, 1])


def cycle_jacobian(m: MapInstance, orbit) -> float:
    """Product of the closed-form per-step Jacobians along the cycle."""
    pts = orbit.points if isinstance(orbit, Orbit) else orbit
    return float(np.prod(step_dets(m, pts)))


def multipliers(m: MapInstance, orbit) -> Multipliers:
    """Trace, determinant and eigenvalues of the cycle's monodromy matrix."""
    pts = orbit.points if isinstance(orbit, Orbit) else orbit
    T = monodromy(m, pts)
    tr, det = float(np.trace(T)), float(np.linalg.det(T))
    return Multipliers(tr, det, _eig_from(tr, det))


# multi-point Newton ----------------------------------------------------------

def _system(m: MapInstance, z):
    """Residuals and Jacobian of the cyclic system E(z_i, z_{i+1}) = 0.

    ``z`` has shape (K, n, 2); returns G of shape (K, 2n) and J of shape
    (K, 2n, 2n).
    """
    k = KERNELS[m.family]
    K, n, _ = z.shape
    nxt = np.roll(z, -1, axis=1)
    x, y, X, Y = z[..., 0], z[..., 1], nxt[..., 0], nxt[..., 1]
    r1, r2 = k.equations(m, x, y, X, Y)
    G = np.stack([r1, r2], axis=-1).reshape(K, 2 * n)
    A, B = k.partials(m, x, y, X, Y)
    J = np.zeros((K, 2 * n, 2 * n))
    for i in range(n):
        j = (i + 1) % n
        J[:, 2 * i:2 * i + 2, 2 * i:2 * i + 2] += A[:, i]
        J[:, 2 * i:2 * i + 2, 2 * j:2 * j + 2] += B[:, i]
    return G, J


def _step_residual(m: MapInstance, z, cfg: SolverConfig):
    """max |step(z_i) - z_{i+1}| per candidate; inf where the step fails."""
    K, n, _ = z.shape
    X, Y, status = step_array(m, z[..., 0], z[..., 1], cfg)
    nxt = np.roll(z, -1, axis=1)
    d = np.maximum(np.abs(X - nxt[..., 0]), np.abs(Y - nxt[..., 1]))
    d = np.where(status == 0, d, np.inf)
    return d.max(axis=1)


def _newton_batch(m: MapInstance, z, cfg: SolverConfig, iters: int, max_move: float = 2.0):
    """Plain Newton on a batch of cycles with a cap on the step length."""
    z = np.array(z, dtype=float, copy=True)
    K, n, _ = z.shape
    alive = np.ones(K, dtype=bool)
    for _ in range(iters):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        G, J = _system(m, z[idx])
        with np.errstate(all="ignore"):
            ok = np.isfinite(G).all(axis=1) & np.isfinite(J).all(axis=(1, 2))
            ok &= np.abs(np.linalg.det(J)) > 1e-300
        bad = idx[~ok]
        alive[bad] = False
        idx, G, J = idx[ok], G[ok], J[ok]
        if idx.size == 0:
            break
        delta = np.linalg.solve(J, G[..., None])[..., 0]
        size = np.max(np.abs(delta), axis=1)
        scale = np.minimum(1.0, max_move / np.maximum(size, 1e-300))
        z[idx] -= (scale[:, None] * delta).reshape(-1, n, 2)
        blown = idx[~np.isfinite(z[idx]).all(axis=(1, 2)) | (np.abs(z[idx]).max(axis=(1, 2)) > 1e6)]
        alive[blown] = False
    return z, alive


def _smallest_period(pts, tol: float = PRIMITIVE_TOL) -> int:
    n = len(pts)
    scale = max(1.0, float(np.max(np.abs(pts))))
    for d in range(1, n):
        if n % d == 0 and np.max(np.abs(np.roll(pts, -d, axis=0) - pts)) <= tol * scale:
            return d
    return n


def _canonical(pts) -> np.ndarray:
    """Rotate a cycle so that it starts at its lexicographically smallest point."""
    keys = [(round(float(p[0]), 9), round(float(p[1]), 9)) for p in pts]
    i = min(range(len(pts)), key=keys.__getitem__)
    return np.roll(pts, -i, axis=0)


def _as_seed(seed, period: int) -> np.ndarray:
    z = np.asarray(seed, dtype=float)
    if z.ndim == 1 and z.size == 2 * period:
        z = z.reshape(period, 2)
    if z.shape != (period, 2):
        raise DomainError(f"seed must hold {period} points, got shape {z.shape}")
    if not np.isfinite(z).all():
        raise DomainError("seed has non-finite coordinates")
    return z


def cycle_residual(m: MapInstance, points) -> float:
    """Max-norm of the defining equations along a cycle."""
    G, _ = _system(m, np.asarray(points, dtype=float)[None])
    return float(np.max(np.abs(G)))


def make_orbit(m: MapInstance, pts, cfg: SolverConfig = DEFAULT_CONFIG,
               tol_parabolic: float = 1e-8) -> Orbit:
    """Package cycle points with their residual, multipliers and symmetry.

    The residual is the max-norm of the defining equations
    ``E(z_i, z_{i+1})``; no convergence check is made here.
    """
    pts = np.asarray(pts, dtype=float)
    res = cycle_residual(m, pts)
    mult = multipliers(m, pts)
    cdet = cycle_jacobian(m, pts)
    stab = classify_stability(mult.trace, cdet, tol_parabolic)
    orbit = Orbit(len(pts), tuple(Point2(float(a), float(b)) for a, b in pts), res,
                  mult.trace, cdet, mult.eigvals, stab)
    return orbit.with_symmetry(classify_symmetry(orbit))


def find_orbit(m: MapInstance, period: int, seed, cfg: SolverConfig = DEFAULT_CONFIG,
               canonical: bool = False, tol_parabolic: float = 1e-8) -> Orbit:
    """Newton on the 2n-dimensional cyclic system started from ``seed``.

    Parameters
    ----------
    period : int
        Orbit period n.
    seed : array_like, shape (n, 2)
        Initial guess, ordered along the dynamics.
    canonical : bool
        Rotate the result to start at its lexicographically smallest point.

    Raises
    ------
    NoConvergence
        Newton did not reach ``cfg.tol``.
    NonPrimitive
        The solution has a proper sub-period.
    SingularNewtonMatrix
        The Newton matrix is singular, typically exactly at a bifurcation.
    """
    period = int(period)
    if period < 1:
        raise DomainError("period must be positive")
    z = _as_seed(seed, period)[None].copy()
    eps = np.finfo(float).eps
    norm, moved = np.inf, np.inf
    for _ in range(cfg.max_iter + 1):
        G, J = _system(m, z)
        norm = float(np.max(np.abs(G)))
        if not np.isfinite(norm):
            raise NoConvergence("orbit Newton left the domain of the map")
        floor = 8 * eps * max(1.0, float(np.max(np.abs(z))))
        if norm <= cfg.tol or (moved <= floor and norm <= _FLOOR_FACTOR * cfg.tol):
            break
        rc = 1.0 / np.linalg.cond(J[0])
        if not rc > _RCOND_FLOOR:
            raise SingularNewtonMatrix(
                "multi-point Newton matrix is singular; perturb the parameter slightly")
        delta = np.linalg.solve(J[0], G[0])
        lam = 1.0
        for _ in range(30):
            trial = z - lam * delta.reshape(1, period, 2)
            Gt, _ = _system(m, trial)
            nt = float(np.max(np.abs(Gt)))
            if np.isfinite(nt) and nt < norm:
                break
            lam *= 0.5
        else:
            # no decrease possible: we are at the rounding floor or stuck
            if norm <= _FLOOR_FACTOR * cfg.tol:
                break
            raise NoConvergence(f"orbit Newton line search failed at residual {norm:.3e}")
        moved = float(np.max(np.abs(lam * delta)))
        z = trial
    else:
        raise NoConvergence(f"orbit Newton stalled at residual {norm:.3e} after {cfg.max_iter} iterations")
    pts = z[0]
    if not float(_step_residual(m, z, cfg)[0]) <= _STEP_GUARD:
        raise NoConvergence(
            "cycle solves the defining equations on a spurious implicit branch, not along the step map")
    if _smallest_period(pts) != period:
        raise NonPrimitive(f"solution has period {_smallest_period(pts)}, a proper divisor of {period}")
    if canonical:
        pts = _canonical(pts)
    return make_orbit(m, pts, cfg, tol_parabolic)


# brute force -----------------------------------------------------------------

def _iterate_seeds(m: MapInstance, x, y, n: int, cfg: SolverConfig, bound: float):
    """Forward orbits of length n for each start; drops escaping starts."""
    pts = np.empty((x.size, n, 2))
    ok = np.ones(x.size, dtype=bool)
    cx, cy = x.astype(float), y.astype(float)
    for i in range(n):
        pts[:, i, 0], pts[:, i, 1] = cx, cy
        if i + 1 < n:
            with np.errstate(all="ignore"):
                cx, cy, st = step_array(m, cx, cy, cfg)
            ok &= (st == 0) & np.isfinite(cx) & np.isfinite(cy)
            ok &= (np.abs(cx) <= bound) & (np.abs(cy) <= bound)
            cx, cy = np.where(ok, cx, 0.0), np.where(ok, cy, 0.0)
    return pts[ok]


def _dedup(cands, tol: float):
    """Distinct cycles among candidates, compared up to cyclic rotation."""
    if len(cands) == 0:
        return []
    canon = np.array([_canonical(c) for c in cands])
    key = np.round(canon.reshape(len(canon), -1), 4)
    _, first = np.unique(key, axis=0, return_index=True)
    kept = []
    for c in canon[np.sort(first)]:
        if not any(_same_cycle(c, k, tol) for k in kept):
            kept.append(c)
    return kept


def _same_cycle(a, b, tol):
    return any(np.max(np.abs(np.roll(b, -s, axis=0) - a)) <= tol for s in range(len(a)))


def brute_force_seeds(m: MapInstance, period: int, box: SearchBox, cfg: SolverConfig = DEFAULT_CONFIG,
                      dedup_tol: float = DEDUP_TOL, newton_iters: int = 40, chunk: int = 8000,
                      escape_bound: float | None = None) -> list[Orbit]:
    """Distinct primitive period-n orbits reached from a grid of seeds.

    Each grid point is iterated ``period - 1`` times to form a cycle guess,
    the guesses are polished by a batched multi-point Newton, and the
    survivors are deduplicated up to cyclic rotation, refined by
    :func:`find_orbit` and classified against each other.  Completeness is
    not guaranteed.

    Returns orbits sorted by their first (lexicographically smallest) point.
    """
    n = int(period)
    gx, gy = box.points()
    span = max(abs(box.x_min), abs(box.x_max), abs(box.y_min), abs(box.y_max))
    bound = escape_bound if escape_bound is not None else 4.0 * span + 10.0
    found = []
    for s in range(0, gx.size, chunk):
        seeds = _iterate_seeds(m, gx[s:s + chunk], gy[s:s + chunk], n, cfg, bound)
        if len(seeds) == 0:
            continue
        z, alive = _newton_batch(m, seeds, cfg, newton_iters)
        z = z[alive]
        if len(z) == 0:
            continue
        G, _ = _system(m, z)
        good = np.max(np.abs(G), axis=1) <= 1e-9
        z = z[good]
        if len(z) == 0:
            continue
        z = z[_step_residual(m, z, cfg) <= 1e-8]
        prim = np.array([_smallest_period(c, 1e-6) == n for c in z], dtype=bool)
        found.extend(z[prim])
        found = _dedup(found, dedup_tol)
    orbits = []
    for c in found:
        try:
            orbits.append(find_orbit(m, n, c, cfg, canonical=True))
        except (NoConvergence, NonPrimitive, SingularNewtonMatrix):
            continue
    uniq = []
    for o in orbits:
        if not any(_same_cycle(o.array, u.array, dedup_tol) for u in uniq):
            uniq.append(o)
    uniq.sort(key=lambda o: (round(o.points[0].x, 9), o.points[0].y))
    classes = classify_all(uniq)
    return [o.with_symmetry(c) for o, c in zip(uniq, classes)]


def count_by_symmetry(orbits) -> dict:
    out: dict = {}
    for o in orbits:
        out[o.symmetry.kind.value] = out.get(o.symmetry.kind.value, 0) + 1
    return out
