"""Damped Newton solvers used for the implicit map equations.

Both solvers work element-wise on arrays so that one call can advance a
whole batch of points; the per-element outcome is reported through a
status array instead of an exception.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, IllConditioned, NoConvergence

OK = 0
NO_CONVERGENCE = 1
ILL_CONDITIONED = 2

DERIVATIVE_FLOOR = 1e-12
_EPS = np.finfo(float).eps
_MAX_HALVINGS = 30


@dataclass(frozen=True)
class SolverConfig:
    """Newton tolerance, iteration cap and finite-difference step."""

    tol: float = 1e-13
    max_iter: int = 50
    fd_step: float = 1e-6

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be at least 1")
        if not self.fd_step > 0:
            raise DomainError("fd_step must be positive")


DEFAULT_CONFIG = SolverConfig()


def _stagnated(delta, z, r, tol):
    # rounding floor reached: the update no longer moves z and r is already tiny
    return (np.abs(delta) <= 4 * _EPS * np.maximum(1.0, np.abs(z))) & (np.abs(r) <= np.sqrt(tol))


def newton_scalar(fun, z0, cfg: SolverConfig = DEFAULT_CONFIG):
    """Solve ``fun(z) = 0`` element-wise; ``fun`` returns ``(r, dr/dz)``.

    Returns ``(z, residual, status)`` with status codes ``OK``,
    ``NO_CONVERGENCE`` and ``ILL_CONDITIONED``.
    """
    z = np.array(z0, dtype=float, copy=True)
    r, d = fun(z)
    r = np.array(r, dtype=float) + 0.0 * z
    d = np.array(d, dtype=float) + 0.0 * z
    status = np.full(z.shape, NO_CONVERGENCE, dtype=int)
    status[np.abs(r) <= cfg.tol] = OK
    for _ in range(cfg.max_iter):
        active = status == NO_CONVERGENCE
        if not active.any():
            break
        ill = active & ~(np.abs(d) >= DERIVATIVE_FLOOR)
        status[ill] = ILL_CONDITIONED
        active &= ~ill
        if not active.any():
            break
        delta = np.where(active, r / np.where(active, d, 1.0), 0.0)
        lam = np.ones_like(z)
        todo = active.copy()
        z_new, r_new, d_new = z.copy(), r.copy(), d.copy()
        for _ in range(_MAX_HALVINGS):
            trial = np.where(todo, z - lam * delta, z_new)
            rt, dt = fun(trial)
            rt = np.array(rt, dtype=float) + 0.0 * z
            dt = np.array(dt, dtype=float) + 0.0 * z
            accept = todo & np.isfinite(rt) & (np.abs(rt) < np.abs(r) + 0.0 * lam)
            # small residuals: accept the plain Newton step, rounding may not decrease |r|
            accept |= todo & np.isfinite(rt) & (np.abs(r) <= np.sqrt(cfg.tol))
            z_new = np.where(accept, trial, z_new)
            r_new = np.where(accept, rt, r_new)
            d_new = np.where(accept, dt, d_new)
            todo &= ~accept
            if not todo.any():
                break
            lam = np.where(todo, 0.5 * lam, lam)
        stuck = todo
        moved = np.where(active & ~stuck, z_new - z, 0.0)
        z, r, d = z_new, r_new, d_new
        done = active & ~stuck & ((np.abs(r) <= cfg.tol) | _stagnated(moved, z, r, cfg.tol))
        status[done] = OK
        # no descent direction left: treat as converged only at the rounding floor
        floor = active & stuck & (np.abs(r) <= np.sqrt(cfg.tol))
        status[floor] = OK
    return z, r, status


def newton_2d(fun, z0, cfg: SolverConfig = DEFAULT_CONFIG):
    """Element-wise 2-D Newton; ``fun(z1, z2)`` returns ``(r1, r2, J)``.

    ``J`` has shape ``(..., 2, 2)``. Returns ``(z1, z2, residual, status)``
    with the max-norm residual.
    """
    z1 = np.array(z0[0], dtype=float, copy=True)
    z2 = np.array(z0[1], dtype=float, copy=True)
    shape = np.broadcast(z1, z2).shape
    z1, z2 = np.broadcast_to(z1, shape).copy(), np.broadcast_to(z2, shape).copy()

    def evaluate(a, b):
        r1, r2, J = fun(a, b)
        r1 = np.broadcast_to(np.asarray(r1, float), shape)
        r2 = np.broadcast_to(np.asarray(r2, float), shape)
        J = np.broadcast_to(np.asarray(J, float), shape + (2, 2))
        return r1, r2, J

    r1, r2, J = evaluate(z1, z2)
    norm = np.maximum(np.abs(r1), np.abs(r2))
    status = np.full(shape, NO_CONVERGENCE, dtype=int)
    status[norm <= cfg.tol] = OK
    for _ in range(cfg.max_iter):
        active = status == NO_CONVERGENCE
        if not active.any():
            break
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        ill = active & ~(np.abs(det) >= DERIVATIVE_FLOOR)
        status[ill] = ILL_CONDITIONED
        active &= ~ill
        if not active.any():
            break
        safe = np.where(active, det, 1.0)
        d1 = np.where(active, (J[..., 1, 1] * r1 - J[..., 0, 1] * r2) / safe, 0.0)
        d2 = np.where(active, (-J[..., 1, 0] * r1 + J[..., 0, 0] * r2) / safe, 0.0)
        lam = np.ones(shape)
        todo = active.copy()
        n1, n2, nr1, nr2, nJ = z1.copy(), z2.copy(), r1.copy(), r2.copy(), J.copy()
        for _ in range(_MAX_HALVINGS):
            t1 = np.where(todo, z1 - lam * d1, n1)
            t2 = np.where(todo, z2 - lam * d2, n2)
            q1, q2, qJ = evaluate(t1, t2)
            qn = np.maximum(np.abs(q1), np.abs(q2))
            ok = np.isfinite(qn)
            accept = todo & ok & ((qn < norm) | (norm <= np.sqrt(cfg.tol)))
            n1, n2 = np.where(accept, t1, n1), np.where(accept, t2, n2)
            nr1, nr2 = np.where(accept, q1, nr1), np.where(accept, q2, nr2)
            nJ = np.where(accept[..., None, None], qJ, nJ)
            todo &= ~accept
            if not todo.any():
                break
            lam = np.where(todo, 0.5 * lam, lam)
        stuck = todo
        m1 = np.where(active & ~stuck, n1 - z1, 0.0)
        m2 = np.where(active & ~stuck, n2 - z2, 0.0)
        z1, z2, r1, r2, J = n1, n2, nr1, nr2, nJ
        norm = np.maximum(np.abs(r1), np.abs(r2))
        small = (np.abs(m1) <= 4 * _EPS * np.maximum(1.0, np.abs(z1))) & (
            np.abs(m2) <= 4 * _EPS * np.maximum(1.0, np.abs(z2))
        )
        done = active & ~stuck & ((norm <= cfg.tol) | (small & (norm <= np.sqrt(cfg.tol))))
        status[done] = OK
        status[active & stuck & (norm <= np.sqrt(cfg.tol))] = OK
    return z1, z2, norm, status


def raise_for_status(status, what: str, cfg: SolverConfig) -> None:
    """Turn the worst entry of a status array into the matching exception."""
    status = np.asarray(status)
    if np.any(status == ILL_CONDITIONED):
        raise IllConditioned(
            f"{what}: implicit-equation derivative below {DERIVATIVE_FLOOR:g}; "
            "the map is no longer a local diffeomorphism here"
        )
    if np.any(status != OK):
        raise NoConvergence(
            f"{what}: Newton did not reach tol={cfg.tol:g} in {cfg.max_iter} iterations; "
            "the point is likely outside the perturbative regime"
        )
