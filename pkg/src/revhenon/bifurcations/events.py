"""Detection and localisation of bifurcations along a branch."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from ..errors import AmbiguousEvent, DomainError, NoConvergence, NumericalError
from ..maps import DEFAULT_CONFIG, MapInstance, SolverConfig
from ..orbits import Orbit, SearchBox, _system, brute_force_seeds, find_orbit, make_orbit, monodromy
from ..reversibility import SymmetryKind, same_cycle
from .continuation import Branch

log = logging.getLogger(__name__)

BISECT_TOL = 1e-10
RESONANCE_ORDERS = (3, 4, 5, 6)
_CONSERVATIVE_DET = 1e-6


class EventKind(enum.Enum):
    FOLD = "fold"
    PITCHFORK = "pitchfork"
    PERIOD_DOUBLING = "period-doubling"
    PARABOLIC_BIRTH = "parabolic-birth"
    RESONANCE = "resonance"


@dataclass
class BifurcationEvent:
    """A located bifurcation.

    ``resonance`` is ``(p, q)`` for resonance crossings.  ``emitted_branches``
    holds single-sample branches (or seed-only stubs) for the orbits created
    at the event.
    """

    kind: EventKind
    parameter: float
    orbit_at_event: Orbit
    emitted_branches: list = field(default_factory=list)
    resonance: tuple | None = None
    param_name: str = "M"

    @property
    def trace(self) -> float:
        return self.orbit_at_event.trace

    @property
    def det(self) -> float:
        return self.orbit_at_event.cycle_det

    @property
    def label(self) -> str:
        if self.kind is EventKind.RESONANCE:
            return f"resonance {self.resonance[0]}:{self.resonance[1]}"
        return self.kind.value

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "resonance": list(self.resonance) if self.resonance else None,
            "parameter": self.parameter,
            "param": self.param_name,
            "trace": self.trace,
            "det": self.det,
            "orbit": self.orbit_at_event.to_dict(),
            "emitted": [
                b.samples[0][1].to_dict() if b.samples else {"seed": np.asarray(b.seed).tolist()}
                for b in self.emitted_branches
            ],
        }


def g_plus(trace: float, det: float) -> float:
    """Zero when +1 is a multiplier."""
    return trace - (1.0 + det)


def g_minus(trace: float, det: float) -> float:
    """Zero when -1 is a multiplier."""
    return trace + (1.0 + det)


def resonance_targets(orders=RESONANCE_ORDERS):
    """``((p, q), 2 cos(2 pi p / q))`` for primitive p/q with 0 < p < q/2."""
    out = []
    for q in orders:
        for p in range(1, (q + 1) // 2):
            if math.gcd(p, q) == 1 and 2 * p != q:
                out.append(((p, q), 2.0 * math.cos(2.0 * math.pi * p / q)))
    return out


# localisation ------------------------------------------------------------------

def _orbit_between(branch: Branch, value, lo, hi, cfg):
    (v0, o0), (v1, o1) = lo, hi
    t = (value - v0) / (v1 - v0)
    guess = (1 - t) * o0.array + t * o1.array
    return find_orbit(branch.map_at(value), o0.period, guess, cfg)


def bisect_event(branch: Branch, lo, hi, fn, tol: float = BISECT_TOL, cfg: SolverConfig = DEFAULT_CONFIG):
    """Shrink ``[lo, hi]`` (pairs ``(value, orbit)``) until ``fn(orbit)`` changes sign within ``tol``."""
    f_lo = fn(lo[1])
    while abs(hi[0] - lo[0]) > tol:
        mid = 0.5 * (lo[0] + hi[0])
        if mid in (lo[0], hi[0]):
            break
        om = _orbit_between(branch, mid, lo, hi, cfg)
        fm = fn(om)
        if fm == 0:
            return mid, om
        if (fm > 0) == (f_lo > 0):
            lo, f_lo = (mid, om), fm
        else:
            hi = (mid, om)
    mid = 0.5 * (lo[0] + hi[0])
    return mid, _orbit_between(branch, mid, lo, hi, cfg)


def locate_fold(template: MapInstance, param: str, value: float, seed, cfg: SolverConfig = DEFAULT_CONFIG):
    """Solve the cycle equations together with ``trace = 1 + det`` for orbit and parameter.

    Used where a natural-parameter branch turns back and continuation
    stalls.  Returns ``(value, Orbit)``.
    """
    pts = seed.array if isinstance(seed, Orbit) else np.asarray(seed, dtype=float)
    n = len(pts)

    def fun(u):
        z = u[:-1].reshape(1, n, 2)
        m = template.with_param(param, u[-1])
        G, _ = _system(m, z)
        T = monodromy(m, z[0])
        return np.concatenate([G[0], [g_plus(np.trace(T), np.linalg.det(T))]])

    u0 = np.concatenate([pts.ravel(), [value]])
    sol = root(fun, u0, method="hybr", options={"xtol": 1e-14})
    # hybr may report failure once xtol is below rounding; judge by the residual
    if not np.max(np.abs(fun(sol.x))) <= 1e-10:
        raise NoConvergence(f"fold location failed: {sol.message}")
    v = float(sol.x[-1])
    return v, make_orbit(template.with_param(param, v), sol.x[:-1].reshape(n, 2), cfg)


# local orbit counting --------------------------------------------------------------

def _nearby(orbits, centre: Orbit, radius: float, period: int):
    out = []
    c = centre.array
    for o in orbits:
        a = o.array
        if o.period == period:
            d = min(np.max(np.abs(np.roll(a, -k, axis=0) - c)) for k in range(period))
        else:
            d = np.max(np.min(np.max(np.abs(a[:, None] - c[None]), axis=-1), axis=1))
        if d <= radius:
            out.append(o)
    return out


def count_nearby_orbits(m: MapInstance, period: int, centre: Orbit, radius: float, grid: int = 15,
                        cfg: SolverConfig = DEFAULT_CONFIG) -> list:
    """Period-n orbits found by brute force in a box around the first point of ``centre``."""
    p = centre.points[0]
    box = SearchBox.square(radius, grid, center=(p.x, p.y))
    found = brute_force_seeds(m, period, box, cfg)
    return _nearby(found, centre, 2.0 * radius, period)


def _classify_plus_one(branch: Branch, value: float, orbit: Orbit, probe: float, radius: float,
                       grid: int, cfg: SolverConfig):
    n = orbit.period
    sides = {}
    for s in (-1.0, 1.0):
        m = branch.map_at(value + s * probe)
        sides[s] = count_nearby_orbits(m, n, orbit, radius, grid, cfg)
    counts = tuple(sorted(len(v) for v in sides.values()))
    if counts == (1, 3):
        s_many = max(sides, key=lambda k: len(sides[k]))
        many = sides[s_many]
        kinds = [o.symmetry.kind for o in many]
        n_sym = sum(k is SymmetryKind.SYMMETRIC for k in kinds)
        n_cpl = sum(k is SymmetryKind.COUPLE_MEMBER for k in kinds)
        if n_sym == 1 and n_cpl == 2:
            emitted = [o for o in many if o.symmetry.kind is SymmetryKind.COUPLE_MEMBER]
            return EventKind.PITCHFORK, value + s_many * probe, emitted
    if counts in ((1, 2), (0, 2)):
        s_many = max(sides, key=lambda k: len(sides[k]))
        many = sides[s_many]
        return EventKind.FOLD, value + s_many * probe, many
    raise AmbiguousEvent(
        f"+1 crossing at {branch.param}={value:.10g}: nearby period-{n} orbit counts {counts} "
        "match neither a fold (1<->2) nor a pitchfork (1<->3)")


def _stubs(branch: Branch, value: float, orbits, label: str) -> list:
    tpl = branch.template
    return [Branch(tpl, branch.param, samples=[(value, o)], label=label) for o in orbits]


def _doubling_seed(branch: Branch, value: float, orbit: Orbit, amplitude: float) -> np.ndarray:
    m = branch.map_at(value)
    T = monodromy(m, orbit.array)
    w, V = np.linalg.eig(T)
    v = np.real(V[:, np.argmin(np.abs(w + 1.0))])
    pts = orbit.array
    return np.vstack([pts, pts]) + amplitude * np.vstack([np.tile(v, (len(pts), 1)), -np.tile(v, (len(pts), 1))])


def detect_events(branch: Branch, cfg: SolverConfig = DEFAULT_CONFIG, tol: float = BISECT_TOL,
                  classify: bool = True, probe: float = 1e-3, radius: float | None = None,
                  grid: int = 15, resonances: bool = True, on_ambiguous: str = "raise",
                  terminal: bool = True) -> list:
    """Find multiplier crossings of +1, -1 and low-order roots of unity along a branch.

    Crossings are bracketed by sign changes of ``trace - (1 + det)``,
    ``trace + (1 + det)`` and ``trace - 2 cos(2 pi p / q)`` (the latter only
    for conservative orbits) and refined by bisection to ``tol``.  A +1
    crossing is typed by counting period-n orbits in a box of half-width
    ``radius`` (default ten branch steps, at least 0.05) around the event
    orbit at ``parameter +- probe``.  A stalled branch end is located with
    :func:`locate_fold` and typed as a fold, or as a parabolic birth when
    -1 is a multiplier at the same time.
    """
    if len(branch) < 3:
        raise DomainError("detect_events needs a branch with at least 3 samples")
    if on_ambiguous not in ("raise", "skip"):
        raise DomainError("on_ambiguous must be 'raise' or 'skip'")
    vals = branch.values
    if radius is None:
        radius = max(0.05, 10.0 * float(np.median(np.abs(np.diff(vals)))))
    tests = [("+1", lambda o: g_plus(o.trace, o.cycle_det)), ("-1", lambda o: g_minus(o.trace, o.cycle_det))]
    if resonances:
        for pq, target in resonance_targets():
            tests.append((pq, lambda o, t=target: o.trace - t))
    events = []
    samples = branch.samples
    for tag, fn in tests:
        vals_f = [fn(o) for _, o in samples]
        # bracket between consecutive samples where fn is nonzero, so a sample
        # landing exactly on the event is still caught
        nz = [i for i, f in enumerate(vals_f) if f != 0]
        for i, j in zip(nz[:-1], nz[1:]):
            if vals_f[i] * vals_f[j] > 0:
                continue
            lo, hi = samples[i], samples[j]
            if isinstance(tag, tuple) and max(abs(lo[1].cycle_det - 1), abs(hi[1].cycle_det - 1)) > _CONSERVATIVE_DET:
                continue
            value, orbit = bisect_event(branch, lo, hi, fn, tol, cfg)
            if tag == "-1":
                stub = Branch(branch.template, branch.param, seed=_doubling_seed(branch, value, orbit, 1e-3),
                              label="doubled")
                events.append(BifurcationEvent(EventKind.PERIOD_DOUBLING, value, orbit, [stub],
                                               param_name=branch.param))
            elif tag == "+1":
                kind, emitted = EventKind.PITCHFORK, []
                if classify:
                    try:
                        kind, at, orbs = _classify_plus_one(branch, value, orbit, probe, radius, grid, cfg)
                        emitted = _stubs(branch, at, orbs, kind.value)
                    except AmbiguousEvent:
                        if on_ambiguous == "raise":
                            raise
                        continue
                events.append(BifurcationEvent(kind, value, orbit, emitted, param_name=branch.param))
            else:
                events.append(BifurcationEvent(EventKind.RESONANCE, value, orbit, [], resonance=tag,
                                               param_name=branch.param))
    if terminal and branch.stalled_at is not None:
        ev = _terminal_event(branch, radius, grid, probe, cfg)
        if ev is not None:
            events.append(ev)
    direction = 1.0 if vals[-1] >= vals[0] else -1.0
    events.sort(key=lambda e: direction * e.parameter)
    return events


def _terminal_event(branch: Branch, radius: float, grid: int, probe: float, cfg: SolverConfig):
    value, last = branch.samples[-1]
    try:
        v, orbit = locate_fold(branch.template, branch.param, value, last, cfg)
    except NumericalError as exc:
        log.debug("no fold found at the end of the branch: %s", exc)
        return None
    if abs(v - value) > 10.0 * radius:
        return None
    gm = g_minus(orbit.trace, orbit.cycle_det)
    kind = EventKind.PARABOLIC_BIRTH if abs(gm) <= 1e-6 else EventKind.FOLD
    # probe on the side where the branch lives
    side = 1.0 if branch.samples[0][0] >= v else -1.0
    at = v + side * probe
    m = branch.map_at(at)
    periods = (orbit.period, 2 * orbit.period) if kind is EventKind.PARABOLIC_BIRTH else (orbit.period,)
    emitted = []
    for n in periods:
        emitted.extend(count_nearby_orbits(m, n, orbit, radius, grid, cfg))
    return BifurcationEvent(kind, v, orbit, _stubs(branch, at, emitted, kind.value), param_name=branch.param)


def emitted_orbits(event: BifurcationEvent) -> list:
    return [b.samples[0][1] for b in event.emitted_branches if b.samples]


def same_orbit(a: Orbit, b: Orbit, tol: float = 1e-8) -> bool:
    return a.period == b.period and same_cycle(a.array, b.array, tol)
