import json

import numpy as np
import pytest

from revhenon.config import (
    JobConfig,
    load_seed,
    parse_floats,
    parse_nonlinearity,
    parse_perturbation,
    parse_range,
    read_config_file,
)
from revhenon.errors import DomainError
from revhenon.maps import Family


def test_parse_perturbation_forms():
    assert parse_perturbation(None).is_zero
    assert parse_perturbation("0").is_zero
    e = parse_perturbation("1,1,0.05; 2,0,0.01")
    assert e(1.0, 2.0) == pytest.approx(0.1 + 0.01)
    s = parse_perturbation("sep:0,0,0.05/0,0.02")
    assert s.is_separable() and s(2.0, 1.0) == pytest.approx(0.2 + 0.02)
    with pytest.raises(DomainError):
        parse_perturbation("1,1")


def test_parse_range_and_floats():
    assert parse_range("-2:2.5") == (-2.0, 2.5)
    assert parse_floats("1, 2,3", "x") == [1.0, 2.0, 3.0]
    with pytest.raises(DomainError):
        parse_range("1")
    with pytest.raises(DomainError):
        parse_floats("a", "x")


def test_parse_nonlinearity():
    assert parse_nonlinearity(None, 2.0, Family.CONSERVATIVE_H)(1.0) == 1.0
    assert parse_nonlinearity("plus", 2.0, Family.CONSERVATIVE_H)(1.0) == -1.0
    assert parse_nonlinearity("0,0,0,1", 2.0, Family.CONSERVATIVE_H)(2.0) == 8.0


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "job.cfg"
    path.write_text("# comment\nfamily = T2mu\nM = 0.6\nb = -0.5\nmu = 0.02\nperiod = 2\n")
    job = JobConfig.merge(read_config_file(str(path)), {"M": 0.7, "b": None})
    assert job.family == "T2mu" and job.M == 0.7 and job.b == -0.5
    assert job.get("period", 1, int) == 2
    m = job.build_map()
    assert m.family is Family.T2MU and m.b == -0.5 and m.mu == 0.02
    with pytest.raises(DomainError):
        JobConfig.merge({"M": "abc"}, {})
    with pytest.raises(DomainError):
        JobConfig.merge({"family": "nope"}, {}).build_map()


def test_load_seed_json_and_csv(tmp_path):
    js = tmp_path / "o.json"
    js.write_text(json.dumps({"orbits": [{"points": [[0, 1], [1, 0]]}, {"points": [[2, 3]]}]}))
    assert np.array_equal(load_seed(str(js), 1), [[2.0, 3.0]])
    cs = tmp_path / "o.csv"
    cs.write_text("x,y\n0.5,0.25\n1,2\n")
    assert np.array_equal(load_seed(str(cs)), [[0.5, 0.25], [1.0, 2.0]])
    bad = tmp_path / "bad.csv"
    bad.write_text("nothing here\n")
    with pytest.raises(DomainError):
        load_seed(str(bad))
