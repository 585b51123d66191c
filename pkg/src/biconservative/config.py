"""Tolerances and run configuration."""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    # quartic roots
    root_bisect_width: float = 1e-8
    root_residual: float = 1e-13
    # singular-endpoint quadrature
    quad_rtol: float = 1e-11
    quad_atol: float = 1e-14
    # curvature ODE
    ode_rtol: float = 1e-14
    ode_atol: float = 1e-15
    first_integral: float = 1e-8
    # Euler-Lagrange residual, relative to rho
    euler_lagrange: float = 1e-8
    # closure solve
    closure_residual: float = 1e-10
    closure_rtol_d: float = 1e-12
    # profile curve closure, in units of the sphere radius
    curve_closure: float = 1e-6

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """Every knob a CLI run depends on; serialized into JSON outputs."""

    rho: float = 1.0
    d: float | None = None
    m: int | None = None
    n: int | None = None
    max_m: int = 10
    points: int = 64
    dmax: float = 1e4
    samples: int = 2000
    ns: int = 600
    nphi: int = 120
    project: bool = False
    pole_axis: int = 4
    pole_sign: int = 1
    format: str = "json"
    out: str | None = None
    suite: str = "all"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_dict(self) -> dict:
        return asdict(self)


_TOL_NAMES = {f.name for f in fields(Tolerances)}
_RUN_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, text: str):
    kind = _RUN_TYPES.get(name, "float")
    if "bool" in kind:
        return text.strip().lower() in {"1", "true", "yes", "on"}
    if "int" in kind:
        return int(text)
    if "str" in kind:
        return text.strip()
    return float(text)


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines (``#`` comments allowed) into overrides."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    parser.read_string("[run]\n" + text)
    out: dict = {}
    tol: dict = {}
    for key, value in parser["run"].items():
        key = key.strip().replace("-", "_")
        if key in _TOL_NAMES:
            tol[key] = float(value)
        elif key in _RUN_TYPES and key != "tolerances":
            out[key] = _coerce(key, value)
        else:
            raise KeyError(f"unknown config key {key!r}")
    if tol:
        out["tolerances"] = tol
    return out


def load_config(path: str | Path | None, **overrides) -> RunConfig:
    """Build a RunConfig from an optional file; ``overrides`` win."""
    values: dict = parse_config_text(Path(path).read_text()) if path else {}
    tol_values = dict(values.pop("tolerances", {}))
    tol_values.update(overrides.pop("tolerances", {}) or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    if tol_values:
        cfg = replace(cfg, tolerances=replace(cfg.tolerances, **tol_values))
    return cfg
