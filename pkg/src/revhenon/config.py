"""Job configuration: flat key-value files, flag overrides and map construction."""
from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .maps import Family, MapInstance, Nonlinearity, Perturbation, SolverConfig

_SECTION = "job"


def read_config_file(path: str) -> dict:
    """Read ``key = value`` lines (``#`` comments allowed) into a dict."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    with open(path, encoding="utf-8") as fh:
        parser.read_string(f"[{_SECTION}]\n" + fh.read(), source=path)
    return {k.replace("-", "_"): v for k, v in parser[_SECTION].items()}


def parse_floats(text: str, what: str) -> list:
    try:
        return [float(t) for t in str(text).replace(" ", "").split(",") if t != ""]
    except ValueError as exc:
        raise DomainError(f"{what}: expected comma-separated numbers, got {text!r}") from exc


def parse_perturbation(text) -> Perturbation:
    """Perturbation from ``"i,j,c;i,j,c"``, ``"sep:p0,p1,.../q0,q1,..."`` or ``"0"``."""
    if text is None:
        return Perturbation.zero()
    text = str(text).strip()
    if text in ("", "0", "zero", "none"):
        return Perturbation.zero()
    if text.startswith("sep:"):
        body = text[4:]
        p_txt, _, q_txt = body.partition("/")
        return Perturbation.separable(parse_floats(p_txt, "eps p") or [0.0], parse_floats(q_txt, "eps q") or [0.0])
    terms = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        vals = parse_floats(chunk, "eps term")
        if len(vals) != 3 or vals[0] != int(vals[0]) or vals[1] != int(vals[1]):
            raise DomainError(f"eps term {chunk!r} must be 'i,j,coefficient' with integer powers")
        key = (int(vals[0]), int(vals[1]))
        terms[key] = terms.get(key, 0.0) + vals[2]
    return Perturbation.bivariate(terms)


def parse_range(text: str) -> tuple:
    lo, sep, hi = str(text).partition(":")
    if not sep:
        raise DomainError(f"range must look like lo:hi, got {text!r}")
    return float(lo), float(hi)


def parse_nonlinearity(text, M: float, family: Family) -> Nonlinearity:
    if text is None:
        text = "plus" if family in (Family.HM1MU, Family.NONORIENTABLE_HAT_HM1) else "minus"
    text = str(text).strip()
    if text == "minus":
        return Nonlinearity.quadratic_minus(M)
    if text == "plus":
        return Nonlinearity.quadratic_plus(M)
    return Nonlinearity.polynomial(parse_floats(text, "F"))


@dataclass
class JobConfig:
    """Everything a CLI job needs, merged from file and flags."""

    family: str = "ConservativeH"
    M: float = 4.0
    b: float = 1.0
    mu: float = 0.0
    F: str | None = None
    eps: str | None = None
    eps2: str | None = None
    strict: bool = True
    tol: float = 1e-13
    max_iter: int = 50
    fd_step: float = 1e-6
    extra: dict = field(default_factory=dict)

    _FIELDS = ("family", "M", "b", "mu", "F", "eps", "eps2", "strict", "tol", "max_iter", "fd_step")

    @classmethod
    def merge(cls, file_values: dict, overrides: dict) -> "JobConfig":
        values = dict(file_values)
        values.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls()
        for k, v in values.items():
            if k in cls._FIELDS:
                setattr(cfg, k, v)
            else:
                cfg.extra[k] = v
        try:
            cfg.M, cfg.b, cfg.mu = float(cfg.M), float(cfg.b), float(cfg.mu)
            cfg.tol, cfg.fd_step = float(cfg.tol), float(cfg.fd_step)
            cfg.max_iter = int(cfg.max_iter)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"bad numeric setting: {exc}") from exc
        if isinstance(cfg.strict, str):
            cfg.strict = cfg.strict.strip().lower() not in ("0", "false", "no", "off")
        return cfg

    def get(self, key: str, default=None, kind=None):
        v = self.extra.get(key, default)
        if v is None or kind is None:
            return v
        try:
            return kind(v)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"setting {key}: cannot read {v!r}") from exc

    def solver(self) -> SolverConfig:
        return SolverConfig(self.tol, self.max_iter, self.fd_step)

    def build_map(self) -> MapInstance:
        try:
            family = Family.parse(self.family)
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
        if family is Family.T2MU:
            return MapInstance.t2mu(self.M, self.b, self.mu)
        if family is Family.HM1MU:
            return MapInstance.hm1mu(self.M, self.mu)
        if family is Family.HP1MU:
            return MapInstance.hp1mu(self.M, self.mu)
        return MapInstance(
            family,
            parse_nonlinearity(self.F, self.M, family),
            b=self.b,
            mu=self.mu,
            eps=parse_perturbation(self.eps),
            eps2=parse_perturbation(self.eps2),
            strict=self.strict,
        )


def load_seed(path: str, pick: int = 0) -> np.ndarray:
    """Cycle points from a JSON orbit report or a CSV/whitespace table of x, y rows."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        data = json.loads(text)
        if isinstance(data, dict) and "orbits" in data:
            data = data["orbits"][pick]
        if isinstance(data, dict):
            data = data.get("points", data.get("seed"))
        pts = np.asarray(data, dtype=float)
    else:
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            try:
                rows.append([float(parts[-2]), float(parts[-1])])
            except (ValueError, IndexError):
                continue  # header row
        pts = np.asarray(rows, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise DomainError(f"{path}: could not read a list of (x, y) points")
    return pts
