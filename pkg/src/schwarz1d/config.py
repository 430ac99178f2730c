"""Run configuration: a flat ``key = value`` text file plus command-line overrides.

Keys are the field names of :class:`RunConfig`. Blank lines and ``#`` comments
are ignored. List-valued keys (``p_values``) take comma-separated numbers.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .mesh import Domain
from .potentials import PotentialTag, catalog
from .timeloop import ALLOWED_SOLVERS, Algorithm, InterfaceSolver

MODES = ("evolve", "iterations", "spectrum", "table")
TABLE_KINDS = ("T2", "T4", "T5", "T7")


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple:
    return tuple(float(s) for s in text.split(",") if s.strip())


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "none") else int(text)


@dataclass
class RunConfig:
    mode: str = "evolve"
    a0: float = -16.0
    b0: float = 16.0
    T: float = 1.0
    dt: float = 0.001
    dx: float = 1e-3
    n_sub: int = 2
    potential: str = "neg_x2"
    p: float = 45.0
    p_values: tuple = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0)
    algorithm: str = "direct"
    interface_solver: str = ""
    guess: str = "zero"
    seed: int = 0
    warm_start: bool = False
    tol: float = 3e-12
    nonlinear_tol: float = 1e-12
    max_k: int = 10000
    workers: int = 1
    n_steps: Optional[int] = None
    stride: int = 100
    table: str = "T2"
    scale: str = "coarse"
    dump_interface: bool = False
    out: str = "out"

    def domain(self) -> Domain:
        return Domain(self.a0, self.b0, self.T, self.dt, self.dx)

    def solver(self) -> InterfaceSolver:
        if self.interface_solver:
            return InterfaceSolver(self.interface_solver)
        return InterfaceSolver.LU if Algorithm(self.algorithm) is Algorithm.DIRECT else InterfaceSolver.FIXED

    def validate(self) -> "RunConfig":
        try:
            if self.mode not in MODES:
                raise ValueError(f"mode must be one of {MODES}")
            self.domain()
            PotentialTag(self.potential)
            if self.potential == PotentialTag.CUSTOM.value:
                raise ValueError("the custom potential tag is available only through the Python API")
            alg = Algorithm(self.algorithm)
            if self.solver() not in ALLOWED_SOLVERS[alg]:
                raise ValueError(f"{alg.value} algorithm cannot use the {self.solver().value} interface solver")
            nonlinear = not catalog(self.potential).is_linear
            if self.mode == "evolve" and nonlinear and self.n_sub > 1 and (alg is Algorithm.DIRECT or self.solver() is not InterfaceSolver.FIXED):
                raise ValueError("a nonlinear potential allows only the fixed-point classical or preconditioned iterations")
            if self.n_sub < 1:
                raise ValueError("n_sub must be >= 1")
            if self.workers not in (1, self.n_sub):
                raise ValueError(f"workers must be 1 or n_sub ({self.n_sub}), got {self.workers}")
            if self.guess not in ("zero", "random"):
                raise ValueError("guess must be 'zero' or 'random'")
            if self.tol <= 0 or self.nonlinear_tol <= 0:
                raise ValueError("tolerances must be positive")
            if self.p < 0 or any(q < 0 for q in self.p_values):
                raise ValueError("p must be non-negative")
            if self.table not in TABLE_KINDS:
                raise ValueError(f"table must be one of {TABLE_KINDS}")
            if self.scale not in ("coarse", "paper"):
                raise ValueError("scale must be 'coarse' or 'paper'")
            if self.stride < 1:
                raise ValueError("stride must be >= 1")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def as_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _converter(f: dataclasses.Field):
    if f.name == "p_values":
        return _floats
    if f.name == "n_steps":
        return _opt_int
    default = f.default
    if isinstance(default, bool):
        return _bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


_FIELDS = {f.name: f for f in fields(RunConfig)}


def parse_pairs(pairs, cfg: Optional[RunConfig] = None) -> RunConfig:
    """Apply ``(key, value)`` string pairs on top of ``cfg`` (defaults when None)."""
    cfg = RunConfig() if cfg is None else cfg
    for key, value in pairs:
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            setattr(cfg, key, _converter(_FIELDS[key])(value.strip()))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    return cfg


def split_assignment(line: str, where: str = "") -> tuple:
    if "=" not in line:
        raise ConfigError(f"{where}expected key = value, got {line!r}")
    key, value = line.split("=", 1)
    return key, value


def parse_text(text: str, cfg: Optional[RunConfig] = None) -> RunConfig:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            pairs.append(split_assignment(line, f"line {lineno}: "))
    return parse_pairs(pairs, cfg)


def load(path, overrides=()) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_text(text)
    return parse_pairs([split_assignment(o, "--set: ") for o in overrides], cfg)
