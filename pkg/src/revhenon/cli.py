"""Command-line front end.

Subcommands ``iterate``, ``orbit``, ``verify``, ``branch`` and ``curves``
emit CSV or JSON data; nothing is plotted.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
gate failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import measure
from .bifurcations import continue_branch, curve_F, curve_name, curve_PF, detect_events
from .config import JobConfig, load_seed, parse_range, read_config_file
from .errors import DomainError, NumericalError, RevHenonError
from .maps import Family, differential_array, jacobian_array, sample_domain, step_array, step_many
from .orbits import SearchBox, brute_force_seeds, find_orbit
from .reversibility import classify_all, reversibility_residual_array

log = logging.getLogger("revhenon")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_GATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _point(text: str):
    vals = [float(t) for t in text.split(",")]
    if len(vals) != 2:
        raise UsageError(f"point must be 'x,y', got {text!r}")
    return vals


# commands ---------------------------------------------------------------------------

def cmd_iterate(job: JobConfig, args) -> int:
    m, cfg = job.build_map(), job.solver()
    x, y = _point(args.point or job.get("point", "0,0"))
    steps = args.steps if args.steps is not None else job.get("steps", 10, int)
    if steps < 0:
        raise UsageError("--steps must be non-negative")
    rows = [(0, x, y)]
    for k in range(1, steps + 1):
        X, Y, status = step_array(m, x, y, cfg, inverse=args.backward)
        if int(status) != 0:
            raise NumericalError(f"step {k}: implicit solve failed (status {int(status)}) at ({x!r}, {y!r})")
        x, y = float(X), float(Y)
        rows.append((k, x, y))
    if args.format == "json":
        text = "".join(json.dumps({"step": k, "x": a, "y": b}) + "\n" for k, a, b in rows)
    else:
        text = csv_text(["step", "x", "y"], rows)
    _emit(text, args.out)
    return EXIT_OK


def _search_box(job: JobConfig, args) -> SearchBox:
    radius = args.box if args.box is not None else job.get("box", 3.5, float)
    grid = args.grid if args.grid is not None else job.get("grid", 100, int)
    return SearchBox.square(radius, grid)


def cmd_orbit(job: JobConfig, args) -> int:
    m, cfg = job.build_map(), job.solver()
    period = args.period if args.period is not None else job.get("period", 1, int)
    seed_file = args.seed_file or job.get("seed_file")
    if seed_file:
        seed = load_seed(seed_file, args.pick)
        if len(seed) != period:
            period = len(seed)
        orbits = [find_orbit(m, period, seed, cfg)]
    else:
        orbits = brute_force_seeds(m, period, _search_box(job, args), cfg)
    classes = classify_all(orbits)
    report = {
        "family": m.family.value,
        "M": m.M,
        "b": m.b,
        "mu": m.mu,
        "period": period,
        "orbits": [],
    }
    for i, (o, c) in enumerate(zip(orbits, classes)):
        d = o.with_symmetry(c).to_dict()
        d["id"] = i
        report["orbits"].append(d)
    if args.format == "csv":
        rows = []
        for i, o in enumerate(orbits):
            for k, p in enumerate(o.points):
                rows.append((i, k, p.x, p.y, o.trace, o.cycle_det, o.stability.value, classes[i].kind.value))
        _emit(csv_text(["orbit", "index", "x", "y", "trace", "det", "stability", "symmetry"], rows), args.out)
    else:
        _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_verify(job: JobConfig, args) -> int:
    m, cfg = job.build_map(), job.solver()
    n = args.samples if args.samples is not None else job.get("samples", 1000, int)
    radius = args.box if args.box is not None else job.get("box", 2.0, float)
    x, y, tried = sample_domain(m, n, radius, args.rng_seed, cfg)
    gates = {
        "reversibility": job.get("gate_reversibility", 1e-11, float),
        "jacobian": job.get("gate_jacobian", 1e-6, float),
        "transfer": job.get("gate_transfer", 1e-10, float),
    }
    results = {}
    rev = reversibility_residual_array(m, x, y, cfg)
    results["reversibility"] = float(np.max(rev))
    X, Y = step_many(m, x, y, cfg)
    J = jacobian_array(m, x, y, X, Y)
    h = cfg.fd_step
    k = min(n, job.get("fd_samples", 500, int))
    xs, ys = x[:k], y[:k]
    Xp, Yp = step_many(m, xs + h, ys, cfg)
    Xm, Ym = step_many(m, xs - h, ys, cfg)
    Xq, Yq = step_many(m, xs, ys + h, cfg)
    Xr, Yr = step_many(m, xs, ys - h, cfg)
    det_fd = ((Xp - Xm) * (Yq - Yr) - (Xq - Xr) * (Yp - Ym)) / (4 * h * h)
    results["jacobian"] = float(np.max(np.abs(J[:k] - det_fd) / np.maximum(1.0, np.abs(J[:k]))))
    D = differential_array(m, x, y, X, Y)
    results["implicit_vs_closed_form"] = float(np.max(np.abs(np.linalg.det(D) - J)))
    if m.family is Family.QR_EXAMPLE1 and m.eps.is_separable():
        spec = measure.DensitySpec.from_map(m)
        results["transfer"] = float(np.max(measure.transfer_residual_array(m, spec, x, y, cfg)))
    passed = {name: results[name] <= gate for name, gate in gates.items() if name in results}
    report = {"family": m.family.value, "samples": n, "candidates_drawn": tried, "results": results, "gates": gates, "passed": passed}
    if args.format == "csv":
        rows = [(name, results[name], gates.get(name, ""), passed.get(name, "")) for name in results]
        _emit(csv_text(["check", "value", "gate", "passed"], rows), args.out)
    else:
        _emit(dumps(report), args.out)
    return EXIT_OK if all(passed.values()) else EXIT_GATE


def cmd_branch(job: JobConfig, args) -> int:
    m, cfg = job.build_map(), job.solver()
    param = args.param or job.get("param", "M")
    rng_text = args.range or job.get("range")
    if not rng_text:
        raise UsageError("branch needs --range lo:hi")
    lo, hi = parse_range(rng_text)
    step = args.step if args.step is not None else job.get("step", 0.01, float)
    template = m.with_param(param, lo)
    seed_file = args.seed_file or job.get("seed_file")
    if seed_file:
        seed = load_seed(seed_file, args.pick)
    else:
        period = args.period if args.period is not None else job.get("period", 1, int)
        found = brute_force_seeds(template, period, _search_box(job, args), cfg)
        if not found:
            raise NumericalError(f"no period-{period} orbit found at {param}={lo:g}")
        if args.pick >= len(found):
            raise UsageError(f"--pick {args.pick} but only {len(found)} orbits were found")
        seed = found[args.pick].array
    branch = continue_branch(template, param, lo, hi, seed, step=step, cfg=cfg, on_stall="stop")
    events = detect_events(branch, cfg, on_ambiguous="skip") if len(branch) >= 3 else []
    n = branch.period
    header = [param, "trace", "det"] + [f"{c}{i}" for i in range(n) for c in ("x", "y")]
    rows = [[v, o.trace, o.cycle_det] + list(o.array.ravel()) for v, o in branch.samples]
    ev = {"param": param, "stalled_at": branch.stalled_at, "events": [e.to_dict() for e in events]}
    if args.format == "json":
        _emit(dumps({"branch": [dict(zip(header, r)) for r in rows], **ev}), args.out)
    else:
        _emit(csv_text(header, rows), args.out)
        events_out = args.events or job.get("events")
        if events_out:
            _emit(dumps(ev), events_out)
    return EXIT_OK


def cmd_curves(job: JobConfig, args) -> int:
    lo, hi = parse_range(args.range or job.get("range", "-2:2"))
    count = args.steps if args.steps is not None else job.get("steps", 41, int)
    if count < 2:
        raise UsageError("--steps must be at least 2 for a curve table")
    mu = job.mu
    rows = []
    for b in np.linspace(lo, hi, count):
        if abs(b) < 1e-6:
            continue
        rows.append((b, mu, curve_name("F", b), curve_F(b, mu), curve_name("PF", b), curve_PF(b, mu)))
    if args.format == "json":
        keys = ["b", "mu", "fold_curve", "M_fold", "pitchfork_curve", "M_pitchfork"]
        _emit(dumps([dict(zip(keys, r)) for r in rows]), args.out)
    else:
        _emit(csv_text(["b", "mu", "fold_curve", "M_fold", "pitchfork_curve", "M_pitchfork"], rows), args.out)
    return EXIT_OK


COMMANDS = {
    "iterate": cmd_iterate,
    "orbit": cmd_orbit,
    "verify": cmd_verify,
    "branch": cmd_branch,
    "curves": cmd_curves,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("map and solver")
    g.add_argument("--config", help="flat key = value file; flags override it")
    g.add_argument("--family", help="map family name, e.g. Hp1mu, T2mu, QRexample1")
    g.add_argument("--M", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--mu", type=float)
    g.add_argument("--F", help="'minus' (M - y^2), 'plus' (-M + y^2) or coefficients c0,c1,...")
    g.add_argument("--eps", help="'i,j,c;...' bivariate terms or 'sep:p0,p1,.../q0,q1,...'")
    g.add_argument("--eps2", help="second perturbation of QRhatH, same syntax as --eps")
    g.add_argument("--no-strict", dest="strict", action="store_false", default=None,
                   help="skip the evenness check of the nonorientable family")
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iter", type=int)
    o = common.add_argument_group("job")
    o.add_argument("--period", type=int)
    o.add_argument("--seed-file")
    o.add_argument("--pick", type=int, default=0, help="which orbit of a seed file or search to use")
    o.add_argument("--range", help="lo:hi")
    o.add_argument("--steps", type=int)
    o.add_argument("--grid", type=int)
    o.add_argument("--box", type=float, help="half-width of the sampling / search box")
    o.add_argument("--out", help="output path (default stdout)")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="revhenon", description="Reversible Henon-like maps: orbits and bifurcations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("iterate", parents=[common], help="forward or backward trajectory")
    p.add_argument("--point", help="initial point x,y")
    p.add_argument("--backward", action="store_true")
    p = sub.add_parser("orbit", parents=[common], help="find or search periodic orbits")
    p = sub.add_parser("verify", parents=[common], help="reversibility, Jacobian and density checks")
    p.add_argument("--samples", type=int)
    p.add_argument("--rng-seed", type=int, default=0)
    p = sub.add_parser("branch", parents=[common], help="continue an orbit and detect bifurcations")
    p.add_argument("--param", choices=("M", "b", "mu"))
    p.add_argument("--step", type=float)
    p.add_argument("--events", help="where to write the JSON event list in csv mode")
    sub.add_parser("curves", parents=[common], help="fold and pitchfork curves of T2mu over b")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        file_values = read_config_file(args.config) if args.config else {}
        overrides = {
            "family": args.family, "M": args.M, "b": args.b, "mu": args.mu, "F": args.F,
            "eps": args.eps, "eps2": args.eps2, "strict": args.strict, "tol": args.tol,
            "max_iter": args.max_iter,
        }
        job = JobConfig.merge(file_values, overrides)
        return COMMANDS[args.command](job, args)
    except (UsageError, DomainError, OSError) as exc:
        print(f"revhenon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"revhenon: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RevHenonError as exc:
        print(f"revhenon: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
