"""Natural-parameter continuation of periodic orbits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, NoConvergence, NumericalError, StallAtSingularity
from ..maps import DEFAULT_CONFIG, MapInstance, SolverConfig
from ..orbits import Orbit, find_orbit

MIN_STEP = 1e-9
PARAMS = ("M", "b", "mu")


@dataclass
class Branch:
    """Orbits of one period followed along a single parameter.

    ``samples`` holds ``(value, Orbit)`` pairs in continuation order.  A
    branch stub emitted by an event may carry only a ``seed``.
    """

    template: MapInstance
    param: str
    samples: list = field(default_factory=list)
    seed: np.ndarray | None = None
    stalled_at: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.param not in PARAMS:
            raise DomainError(f"free parameter must be one of {PARAMS}")

    def __len__(self):
        return len(self.samples)

    @property
    def period(self) -> int:
        if self.samples:
            return self.samples[0][1].period
        return 0 if self.seed is None else len(self.seed)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.samples])

    @property
    def orbits(self) -> list:
        return [o for _, o in self.samples]

    @property
    def traces(self) -> np.ndarray:
        return np.array([o.trace for _, o in self.samples])

    @property
    def dets(self) -> np.ndarray:
        return np.array([o.cycle_det for _, o in self.samples])

    def map_at(self, value: float) -> MapInstance:
        return self.template.with_param(self.param, value)


def _predict(samples, value):
    (v1, o1) = samples[-1]
    if len(samples) < 2:
        return o1.array
    v0, o0 = samples[-2]
    if v1 == v0:
        return o1.array
    slope = (o1.array - o0.array) / (v1 - v0)
    return o1.array + slope * (value - v1)


def continue_branch(template: MapInstance, param: str, start: float, stop: float, seed,
                    step: float = 0.01, cfg: SolverConfig = DEFAULT_CONFIG,
                    min_step: float = MIN_STEP, max_jump: float = 0.25,
                    on_stall: str = "raise", label: str = "") -> Branch:
    """Follow a periodic orbit from ``start`` to ``stop`` in parameter ``param``.

    Parameters
    ----------
    seed : Orbit or array_like (n, 2)
        Orbit (or guess) at ``start``.
    step : float
        Initial and maximal step size; halved on failure, regrown by 1.5x
        after each success.
    max_jump : float
        Largest accepted max-norm distance between the predicted and the
        corrected orbit; larger moves count as a failed step so the branch
        cannot hop onto a different orbit.
    on_stall : {"raise", "stop"}
        What to do when the step falls below ``min_step``: raise
        :class:`StallAtSingularity` (carrying the partial branch) or
        return the partial branch with ``stalled_at`` set.
    """
    if on_stall not in ("raise", "stop"):
        raise DomainError("on_stall must be 'raise' or 'stop'")
    if not step > 0:
        raise DomainError("step must be positive")
    pts = seed.array if isinstance(seed, Orbit) else np.asarray(seed, dtype=float)
    n = len(pts)
    branch = Branch(template, param, label=label)
    m0 = template.with_param(param, start)
    branch.samples.append((float(start), find_orbit(m0, n, pts, cfg)))
    direction = 1.0 if stop >= start else -1.0
    h, h_max = step, step
    value = float(start)
    while direction * (stop - value) > 0:
        nxt = value + direction * h
        if direction * (nxt - stop) > 0 or abs(stop - nxt) < 0.25 * min_step:
            nxt = float(stop)
        guess = _predict(branch.samples, nxt)
        try:
            orbit = find_orbit(template.with_param(param, nxt), n, guess, cfg)
            if np.max(np.abs(orbit.array - guess)) > max_jump:
                raise NoConvergence("continuation step jumped to a different orbit")
        except (NumericalError, DomainError) as exc:
            h *= 0.5
            if h < min_step:
                branch.stalled_at = value
                if on_stall == "raise":
                    raise StallAtSingularity(
                        f"continuation in {param} stalled at {value:.12g}: {exc}", branch=branch
                    ) from exc
                return branch
            continue
        branch.samples.append((nxt, orbit))
        value = nxt
        h = min(h_max, 1.5 * h)
    return branch
