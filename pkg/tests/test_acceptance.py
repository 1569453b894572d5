"""End-to-end acceptance checks, one test per criterion.

Each test measures its own wall time against the stated budget.  A summary
line per criterion is printed at the end of the pytest run.
"""
import time

import numpy as np
import pytest

from revhenon.bifurcations import (
    EventKind,
    continue_branch,
    count_nearby_orbits,
    curve_F,
    curve_PF,
    detect_events,
    emitted_orbits,
    hm1mu_fixed_points,
    locate_fold,
    symmetric_period6_closed_form,
    t2mu_fixed_points,
    t2mu_symmetric_fixed_points,
    trace_level_parameters,
    trace_polynomial,
)
from revhenon.fixtures import (
    O6_CYCLE_JACOBIAN_MU001,
    O6_M,
    O6_MU,
    O6_YS_MU0,
    O6_YS_MU001,
    P5_M,
    P5_YS,
    PD_M2,
    PD_M3,
    points_from_ys,
)
from revhenon.maps import (
    Family,
    MapInstance,
    Nonlinearity,
    Perturbation,
    jacobian_array,
    jacobian_fd,
    sample_domain,
    step_many,
)
from revhenon.measure import DensitySpec, transfer_residual_array
from revhenon.orbits import SearchBox, Stability, brute_force_seeds, cycle_jacobian, find_orbit
from revhenon.reversibility import SymmetryKind, reversibility_residual_array

F_MINUS = Nonlinearity.quadratic_minus(1.0)
F_PLUS = Nonlinearity.quadratic_plus(1.0)
EPS = Perturbation.bivariate({(1, 1): 0.05, (2, 0): 0.01, (0, 2): -0.01, (1, 0): 0.04, (0, 1): 0.03})
EPS2 = Perturbation.bivariate({(1, 1): -0.03, (0, 2): 0.02, (2, 0): 0.05})
EPS_EVEN_Y = Perturbation.bivariate({(1, 1): 0.05, (2, 0): 0.03, (0, 2): 0.02})

CATALOG = {
    "ConservativeH": MapInstance(Family.CONSERVATIVE_H, F_MINUS),
    "CrossFormTildeH": MapInstance(Family.CROSS_FORM_TILDE_H, F_MINUS, eps=EPS),
    "TildeHm2": MapInstance(Family.TILDE_H_M2, F_MINUS, eps=EPS),
    "TildeH12inv": MapInstance(Family.TILDE_H12_INV, F_MINUS, b=-0.7, eps=EPS),
    "QRhatH": MapInstance(Family.QR_HAT_H, F_MINUS, eps=EPS, eps2=EPS2),
    "QRexample1": MapInstance(Family.QR_EXAMPLE1, F_MINUS, eps=EPS),
    "QRexample2": MapInstance(Family.QR_EXAMPLE2, F_MINUS, eps=EPS2),
    "NonorientableHatHm1": MapInstance(Family.NONORIENTABLE_HAT_HM1, F_PLUS, eps=EPS_EVEN_Y),
    "T2mu": MapInstance.t2mu(1.0, 0.6, 0.05),
    "Hm1mu": MapInstance.hm1mu(1.0, 0.05),
    "Hp1mu": MapInstance.hp1mu(4.0, 0.05),
}

SEPARABLE = [
    MapInstance(Family.QR_EXAMPLE1, F_MINUS, eps=Perturbation.separable([0, 0, 0.05], [0, 0, 0, 0.02])),
    MapInstance(Family.QR_EXAMPLE1, Nonlinearity.quadratic_minus(2.0),
                eps=Perturbation.separable([0, 0.03, 0, 0.01], [0.1, -0.05])),
    MapInstance(Family.QR_EXAMPLE1, Nonlinearity.polynomial([0.5, 0.2, -1.0, 0.1]),
                eps=Perturbation.separable([0, 0, -0.04, 0, 0.005], [0, 0, 0.03])),
]


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_reversibility_certification():
    with Timer() as t:
        worst = {}
        for name, m in CATALOG.items():
            x, y, _ = sample_domain(m, 1000, 2.0, rng=1)
            worst[name] = float(np.max(reversibility_residual_array(m, x, y)))
    print("max reversibility residual per family:", worst)
    assert all(v <= 1e-11 for v in worst.values()), worst
    assert t.elapsed < 10.0


def test_criterion_02_jacobian_formulas():
    with Timer() as t:
        worst = {}
        for name, m in CATALOG.items():
            x, y, _ = sample_domain(m, 500, 2.0, rng=2)
            X, Y = step_many(m, x, y)
            J = jacobian_array(m, x, y, X, Y)
            fd = np.array([np.linalg.det(jacobian_fd(m, (a, b))) for a, b in zip(x, y)])
            worst[name] = float(np.max(np.abs(J - fd) / np.maximum(1.0, np.abs(J))))
    print("max relative analytic-vs-fd error per family:", worst)
    assert all(v < 1e-6 for v in worst.values()), worst
    assert t.elapsed < 10.0


def test_criterion_03_orbit_reproduction():
    with Timer() as t:
        o0 = find_orbit(MapInstance.hp1mu(O6_M, 0.0), 6, points_from_ys(O6_YS_MU0))
        o1 = find_orbit(MapInstance.hp1mu(O6_M, O6_MU), 6, points_from_ys(O6_YS_MU001))
        J = cycle_jacobian(MapInstance.hp1mu(O6_M, O6_MU), o1)
    assert np.max(np.abs(o0.ys - O6_YS_MU0)) <= 1e-8
    assert np.max(np.abs(o1.ys - O6_YS_MU001)) <= 1e-8
    assert abs(J - O6_CYCLE_JACOBIAN_MU001) <= 1e-8
    assert t.elapsed < 1.0


def test_criterion_04_pitchfork_at_M3():
    with Timer() as t:
        # symmetric 6-cycle branch through the symmetry-breaking point
        start = symmetric_period6_closed_form(1.3, 1)
        branch = continue_branch(MapInstance.henon(1.3), "M", 1.3, 3.2, start, step=0.02)
        events = detect_events(branch, resonances=False)
        pf = [e for e in events if e.kind is EventKind.PITCHFORK]
        assert len(pf) == 1
        assert abs(pf[0].parameter - 3.0) <= 1e-6
        couple = emitted_orbits(pf[0])
        assert len(couple) == 2
        assert all(o.symmetry.kind is SymmetryKind.COUPLE_MEMBER for o in couple)

        # trace-polynomial roots x = 3/2, 2  <->  M = x^2 - 1 = 5/4, 3
        ms = trace_level_parameters(2.0)
        assert np.allclose(ms, [1.25, 3.0], atol=1e-12)
        assert abs(trace_polynomial(1.5) - 2) < 1e-12 and abs(trace_polynomial(2.0) - 2) < 1e-12

        # M = 5/4: the elliptic 3-cycle doubles, i.e. its twice-traversed 6-cycle has multiplier +1
        found = brute_force_seeds(MapInstance.henon(1.2), 3, SearchBox.square(2.5, 60))
        o3 = [o for o in found if o.stability is Stability.ELLIPTIC]
        assert len(o3) == 1
        b3 = continue_branch(MapInstance.henon(1.2), "M", 1.2, 1.3, o3[0], step=0.01)
        pd = [e for e in detect_events(b3, resonances=False) if e.kind is EventKind.PERIOD_DOUBLING]
        assert len(pd) == 1
        six_cycle_trace = pd[0].trace ** 2 - 2 * pd[0].det
        assert abs(six_cycle_trace - 2.0) < 1e-6
        located = {"M=5/4": pd[0].parameter, "M=3": pf[0].parameter}
    print("+1 crossings located at", located)
    assert abs(located["M=5/4"] - 1.25) <= 1e-8
    assert abs(located["M=3"] - 3.0) <= 1e-8
    assert t.elapsed < 30.0


def test_criterion_05_period_doubling_anchors():
    with Timer() as t:
        start = symmetric_period6_closed_form(1.26, 1)
        branch = continue_branch(MapInstance.henon(1.26), "M", 1.26, 3.2, start, step=0.01)
        events = detect_events(branch, resonances=False)
        pds = [e.parameter for e in events if e.kind is EventKind.PERIOD_DOUBLING]
    oracle = trace_level_parameters(-2.0)
    print(f"refined period-doubling parameters: {pds!r}; trace-polynomial roots: {oracle!r}")
    assert len(pds) == 2
    assert np.allclose(pds, oracle, atol=1e-8)
    assert t.elapsed < 30.0
    assert abs(pds[0] - PD_M2) <= 5e-4, f"M2 refined to {pds[0]!r}"
    assert abs(pds[1] - PD_M3) <= 5e-4, (
        f"M3 refined to {pds[1]!r}, |diff| = {abs(pds[1] - PD_M3):.3e} from the reference {PD_M3}"
    )


@pytest.mark.parametrize("M", [0.25, 1.0])
def test_criterion_06_fold_flip_inventory(M):
    mu = 0.05
    with Timer() as t:
        m = MapInstance.hm1mu(M, mu)
        fp = hm1mu_fixed_points(M, mu)
        box = SearchBox.square(3.0, 80)
        fixed = brute_force_seeds(m, 1, box)
        two = brute_force_seeds(m, 2, box)
    assert len(fixed) == 2
    assert all(o.symmetry.kind is SymmetryKind.COUPLE_MEMBER for o in fixed)
    pts = sorted((o.points[0] for o in fixed), key=lambda p: p.x)
    assert np.max(np.abs(np.array(pts) - np.array([fp.S1, fp.S2]))) <= 1e-10
    assert fp.J1 < -1 < fp.J2 < 0
    assert abs(fp.J1 * fp.J2 - 1) <= 1e-12
    J = {o.points[0].x < 0: o.cycle_det for o in fixed}
    assert abs(J[True] - fp.J1) <= 1e-10 and abs(J[False] - fp.J2) <= 1e-10
    assert len(two) == 1
    orbit2 = two[0]
    assert orbit2.symmetry.kind is SymmetryKind.SYMMETRIC
    print(f"M={M}: 2-cycle trace {orbit2.trace!r}, det {orbit2.cycle_det!r}, {orbit2.stability.value}")
    assert t.elapsed < 10.0
    assert orbit2.stability is Stability.ELLIPTIC, (
        f"symmetric 2-cycle at M={M} has trace {orbit2.trace:.6f}: {orbit2.stability.value}"
    )


def _t2mu_pitchfork(b, mu):
    m_pf, m_f = curve_PF(b, mu), curve_F(b, mu)
    w = min(0.5 * (m_pf - m_f), 0.2)
    step = w / 20
    probe = step
    lo = m_pf - w
    c = (1.0 - b) / 2.0
    sym = t2mu_symmetric_fixed_points(b, lo, mu)
    seed = min(sym, key=lambda p: abs(p.x - c))
    template = MapInstance.t2mu(lo, b, mu)
    branch = continue_branch(template, "M", lo, m_pf + w, [seed], step=step)
    events = detect_events(branch, resonances=False, probe=probe, radius=3.0 * np.sqrt(probe))
    return m_pf, events


def test_criterion_07_t2mu_diagram():
    bs = np.concatenate([-np.geomspace(2.0, 0.2, 10), np.geomspace(0.2, 2.0, 10)])
    mus = np.linspace(0.0, 0.04, 5)
    worst_dm, worst_dj = 0.0, 0.0
    with Timer() as t:
        for b in bs:
            for mu in mus:
                m_pf, events = _t2mu_pitchfork(b, mu)
                pf = [e for e in events if e.kind is EventKind.PITCHFORK]
                assert len(pf) == 1, (b, mu, [e.label for e in events])
                worst_dm = max(worst_dm, abs(pf[0].parameter - m_pf))
                couple = emitted_orbits(pf[0])
                assert len(couple) == 2
                assert all(o.symmetry.kind is SymmetryKind.COUPLE_MEMBER for o in couple)
                # orient as (M1, M2): M1 has x > y
                c1, c2 = sorted(couple, key=lambda o: o.points[0].y - o.points[0].x)
                J1, J2 = c1.cycle_det, c2.cycle_det
                worst_dj = max(worst_dj, abs(J2 - 1.0 / J1))
                if b * mu > 0:
                    assert J1 < 1 < J2
                ref = t2mu_fixed_points(b, pf[0].emitted_branches[0].samples[0][0], mu)
                assert abs(J1 - ref.J1) <= 1e-9 and abs(J2 - ref.J2) <= 1e-9
    print(f"max |M_event - M_PF| = {worst_dm:.3e}, max |J2 - 1/J1| = {worst_dj:.3e}")
    assert worst_dm <= 1e-6
    assert worst_dj <= 1e-9
    assert t.elapsed < 300.0


def test_criterion_08_invariant_measure():
    with Timer() as t:
        worst = []
        for m in SEPARABLE:
            spec = DensitySpec.from_map(m)
            assert spec.is_positive(2.0)
            x, y, _ = sample_domain(m, 1000, 2.0, rng=8)
            worst.append(float(np.max(transfer_residual_array(m, spec, x, y))))
        control = MapInstance(Family.QR_EXAMPLE1, F_MINUS, eps=Perturbation.bivariate({(2, 1): 0.05}))
        x, y, _ = sample_domain(control, 1000, 2.0, rng=9)
        ctl = transfer_residual_array(control, DensitySpec.from_map(control), x, y)
    print(f"separable residuals {worst}; control median {np.median(ctl):.3e}")
    assert max(worst) <= 1e-10
    assert np.median(ctl) > 1e-4
    assert t.elapsed < 5.0


def test_criterion_09_telescoping_law():
    m = SEPARABLE[0].with_param("M", 4.0)
    with Timer() as t:
        counts, worst = {}, 0.0
        for n in range(1, 9):
            orbits = brute_force_seeds(m, n, SearchBox.square(3.0, 70))
            counts[n] = len(orbits)
            for o in orbits:
                worst = max(worst, abs(cycle_jacobian(m, o) - 1.0))
    print(f"orbits per period {counts}; max |J_n - 1| = {worst:.3e}")
    assert all(counts[n] > 0 for n in range(1, 9) if n != 2) and sum(counts.values()) > 20
    assert worst <= 1e-10
    assert t.elapsed < 60.0


def test_criterion_10_orbit_census():
    with Timer() as t:
        m = MapInstance.henon(4.0)
        orbits = brute_force_seeds(m, 6, SearchBox.square(3.5, 200))
        kinds = [o.symmetry.kind for o in orbits]
        n_couple = sum(k is SymmetryKind.COUPLE_MEMBER for k in kinds)
        n_sym = sum(k is SymmetryKind.SYMMETRIC for k in kinds)

        # symmetric parabolic period-5 orbit: locate, bracket, compare coordinates
        seed = points_from_ys(P5_YS)
        m_star, p5 = locate_fold(MapInstance.henon(P5_M), "M", P5_M, seed)
        delta = 1e-4
        above = count_nearby_orbits(MapInstance.henon(m_star + delta), 5, p5, 0.05)
        below = count_nearby_orbits(MapInstance.henon(m_star - delta), 5, p5, 0.05)
        shifts = [np.max(np.abs(np.roll(p5.ys, -k) - np.array(P5_YS))) for k in range(5)]
    print(f"period-6 orbits found: {len(orbits)} ({n_sym} symmetric, {n_couple} couple members); "
          f"period-5 parabolic at M={m_star!r}, {len(below)} nearby orbits below / {len(above)} above")
    assert n_couple == 2
    assert n_sym == len(orbits) - 2
    assert abs(m_star - P5_M) <= 5e-3
    assert p5.symmetry.kind is SymmetryKind.SYMMETRIC
    assert len(below) == 0 and len(above) == 2
    assert all(o.symmetry.kind is SymmetryKind.SYMMETRIC for o in above)
    assert min(shifts) <= 1e-6
    assert t.elapsed < 600.0
    assert len(orbits) >= 9, f"only {len(orbits)} distinct primitive real period-6 orbits exist at M=4"
