import json
import subprocess
import sys

import numpy as np
import pytest

from revhenon.cli import EXIT_GATE, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_iterate_csv(capsys):
    code, out, _ = run(capsys, "iterate", "--M", "4", "--point", "2.114907541,-1.935432332", "--steps", "1")
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[0] == "step,x,y" and len(lines) == 3
    x, y = map(float, lines[2].split(",")[1:])
    assert x == -1.935432332 and y == pytest.approx(-1.860805853, abs=1e-9)


def test_iterate_backward_round_trip(capsys, tmp_path):
    fwd = tmp_path / "f.csv"
    assert main(["iterate", "--family", "Hp1mu", "--M", "4", "--mu", "0.01", "--point", "1.423687035,2.107429699",
                 "--steps", "2", "--out", str(fwd)]) == EXIT_OK
    last = fwd.read_text().strip().split("\n")[-1].split(",")[1:]
    code, out, _ = run(capsys, "iterate", "--family", "Hp1mu", "--M", "4", "--mu", "0.01", "--backward",
                       "--point=" + ",".join(last), "--steps", "2")
    assert code == EXIT_OK
    x, y = map(float, out.strip().split("\n")[-1].split(",")[1:])
    assert abs(x - 1.423687035) < 1e-11 and abs(y - 2.107429699) < 1e-11


def test_output_is_deterministic(capsys):
    args = ("orbit", "--M", "4", "--period", "6", "--grid", "80", "--box", "3", "--format", "json")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_orbit_json_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "orbit", "--M", "4", "--period", "6", "--grid", "80", "--box", "3", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    kinds = [o["symmetry"] for o in report["orbits"]]
    assert kinds.count("couple") == 2
    path = tmp_path / "orbits.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "orbit", "--M", "4", "--seed-file", str(path), "--pick", "2", "--format", "json")
    again = json.loads(out2)["orbits"][0]
    assert code == EXIT_OK
    assert np.allclose(sorted(map(tuple, again["points"])), sorted(map(tuple, report["orbits"][2]["points"])), atol=1e-12)


def test_verify_passes_and_gate_failure(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--family", "QRexample1", "--M", "1", "--eps", "sep:0,0,0.05/0,0.02",
                       "--samples", "200", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["results"]["transfer"] <= 1e-10 and all(report["passed"].values())
    cfg = tmp_path / "gate.cfg"
    cfg.write_text("family = QRexample1\nM = 1\neps = 2,1,0.05\ngate_jacobian = 0\n")
    code, _, _ = run(capsys, "verify", "--config", str(cfg), "--samples", "50")
    assert code == EXIT_GATE


def test_branch_with_events(capsys, tmp_path):
    events = tmp_path / "ev.json"
    code, out, _ = run(capsys, "branch", "--M", "2.5", "--period", "1", "--pick", "1", "--range", "2.5:3.5",
                       "--step", "0.05", "--events", str(events))
    assert code == EXIT_OK
    assert out.startswith("M,trace,det,x0,y0")
    ev = json.loads(events.read_text())["events"]
    kinds = [e["kind"] for e in ev]
    assert "period-doubling" in kinds
    pd = ev[kinds.index("period-doubling")]
    assert pd["parameter"] == pytest.approx(3.0, abs=1e-9)


def test_curves(capsys):
    code, out, _ = run(capsys, "curves", "--range=-1:1", "--steps", "3", "--mu", "0")
    assert code == EXIT_OK
    rows = [r.split(",") for r in out.strip().split("\n")[1:]]
    assert len(rows) == 2  # b = 0 is skipped
    assert rows[0][2] == "F1" and float(rows[0][3]) == -1.0 and float(rows[0][5]) == 3.0


def test_usage_errors(capsys):
    assert run(capsys, "iterate", "--point", "1")[0] == EXIT_USAGE
    assert run(capsys, "branch", "--M", "1")[0] == EXIT_USAGE
    assert run(capsys, "iterate", "--family", "Nope")[0] == EXIT_USAGE
    assert run(capsys, "orbit", "--seed-file", "/nonexistent/file.json")[0] == EXIT_USAGE
    code, _, err = run(capsys, "iterate", "--family", "T2mu", "--b", "0")
    assert code == EXIT_USAGE and "b" in err
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == EXIT_USAGE


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(capsys, "iterate", "--family", "Hp1mu", "--M", "1", "--mu", "0.6", "--point", "3,3")
    assert code == EXIT_NUMERICAL and "numerical" in err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "revhenon.cli", "curves", "--steps", "2", "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)) == 2
