"""Scenario configuration: flat ``key = value`` files, one scenario each.

Blank lines and ``#`` comments are ignored. Every key must belong to the
chosen scenario; all violations are collected before failing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .numerics import next_power_of_two

__all__ = ["ConfigError", "Param", "ScenarioConfig", "SCENARIOS", "parse_config", "load_config"]


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # int | float | str | choice | float_or_auto
    default: Any
    help: str
    check: Callable[[Any], bool] | None = None
    rule: str = ""
    choices: tuple = ()


def _pos(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _grid(n_default: int, length_default: float) -> list[Param]:
    return [
        Param("n", "int", n_default, "lattice points; rounded up to a power of two",
              lambda v: v >= 8, "must be >= 8"),
        Param("length", "float", length_default, "box length L (natural units)", _pos, "must be > 0"),
    ]


_MODEL = [
    Param("hbar_over_m", "float", 1.0, "hbar / m, the mass parameter", _pos, "must be > 0"),
    Param("c", "float", 1.0, "speed of light", _pos, "must be > 0"),
]
_EPS = Param("eps", "float", 1e-6, "classification tolerance (nats)", _pos, "must be > 0")


def _packet(t_max: float) -> list[Param]:
    return _grid(1024, 100.0) + _MODEL + [
        Param("sigma2", "float", 1.0, "amplitude variance of the packet", _pos, "must be > 0"),
        Param("r0", "float", 0.0, "packet center"),
        Param("k0", "float", 0.0, "packet momentum"),
        Param("t_max", "float", t_max, "final time (T for 'decreasing')", _pos, "must be > 0"),
        Param("n_steps", "int", 41, "number of sampled times", lambda v: v >= 8, "must be >= 8"),
        _EPS,
    ]


_BASIS = _grid(256, 20.0) + [
    Param("basis_width", "float", 1.0, "width of the Hermite-Gaussian basis", _pos, "must be > 0"),
]

SCENARIOS: dict[str, list[Param]] = {
    "coherent": _packet(10.0) + [
        Param("propagator", "choice", "exact", "exact spectral evolution or the quadratic transform",
              choices=("exact", "taylor")),
    ],
    "decreasing": _packet(10.0),
    "dispersion-table": _MODEL + [
        Param("k_min", "float", -10.0, "first wavenumber"),
        Param("k_max", "float", 10.0, "last wavenumber"),
        Param("n_k", "int", 201, "number of wavenumbers", lambda v: v >= 2, "must be >= 2"),
    ],
    "two-state": [
        Param("omega1", "float", 1.0, "unperturbed frequency of state 0"),
        Param("omega2", "float", 2.0, "unperturbed frequency of state 1"),
        Param("w11", "float", 0.0, "interaction matrix element (0,0)"),
        Param("w12", "float", 0.1, "interaction matrix element (0,1)"),
        Param("w22", "float", 0.0, "interaction matrix element (1,1)"),
        Param("t_max", "float_or_auto", "auto", "final time; 'auto' is one full period 2 pi / eta",
              _pos, "must be > 0"),
        Param("n_steps", "int", 201, "number of sampled times", lambda v: v >= 8, "must be >= 8"),
        _EPS,
    ] + _BASIS,
    "multi-state": [
        Param("dim", "int", 5, "number of levels N", lambda v: 2 <= v <= 64, "must be in [2, 64]"),
        Param("level_spacing", "float", 1.0, "diagonal frequencies are spacing * (1..N)"),
        Param("coupling", "float", 0.1, "scale of the random symmetric off-diagonal couplings",
              _nonneg, "must be >= 0"),
        Param("seed", "int", 0, "seed of the random couplings (overridden by --seed)"),
        Param("t_max", "float", 20.0, "final time", _pos, "must be > 0"),
        Param("n_steps", "int", 201, "number of sampled times", lambda v: v >= 8, "must be >= 8"),
        _EPS,
    ] + _BASIS,
    "collide": _grid(1024, 400.0) + _MODEL + [
        Param("k1", "float", 1.0, "packet momenta are +k1 (left) and -k1 (right)"),
        Param("c1", "float", -30.0, "left packet center"),
        Param("c2", "float", 30.0, "right packet center"),
        Param("sigma2", "float", 1.0, "shared amplitude variance", _pos, "must be > 0"),
        Param("t_max", "float", 80.0, "final time", _pos, "must be > 0"),
        Param("n_steps", "int", 81, "number of sampled times", lambda v: v >= 8, "must be >= 8"),
        Param("stats", "choice", "fermion", "exchange statistics", choices=("fermion", "boson")),
        Param("snapshot_stride", "float", 20.0, "time between density snapshots", _pos, "must be > 0"),
        Param("snapshot_decimate", "int", 8, "keep every k-th lattice point in snapshots",
              lambda v: v >= 1, "must be >= 1"),
        Param("workers", "int", 1, "threads used for independent time samples",
              lambda v: v >= 1, "must be >= 1"),
        _EPS,
    ],
    "classify": [
        Param("input", "str", None, "CSV with a 't' column and the entropy column (required)"),
        Param("column", "str", "s_total", "column to classify"),
        _EPS,
    ],
}


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    output: Path = Path("out")
    format: str = "csv"
    seed: int | None = None
    notes: list = field(default_factory=list)
    n_requested: int | None = None

    def __getitem__(self, key):
        return self.params[key]

    def echo(self) -> dict:
        """Resolved parameters, enough to re-run the scenario."""
        return {"scenario": self.scenario, **self.params}


def _convert(p: Param, raw: str):
    if p.kind == "int":
        v = float(raw)
        if not v.is_integer():
            raise ValueError("expected an integer")
        return int(v)
    if p.kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError("expected a finite number")
        return v
    if p.kind == "float_or_auto":
        return "auto" if raw.strip().lower() == "auto" else _convert(Param(p.name, "float", None, ""), raw)
    if p.kind == "choice":
        if raw not in p.choices:
            raise ValueError(f"expected one of {', '.join(p.choices)}")
        return raw
    return raw


def _split_lines(text: str, errors: list[str]) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            errors.append(f"line {lineno}: empty key")
        elif key in pairs:
            errors.append(f"line {lineno}: duplicate key '{key}'")
        else:
            pairs[key] = value
    return pairs


def parse_config(text: str, scenario: str | None = None, **overrides) -> ScenarioConfig:
    """Validate a configuration document against a scenario's parameter table.

    ``scenario`` may come from the caller (the CLI subcommand) or from a
    ``scenario = ...`` line; if both are given they must agree. Raises
    :class:`ConfigError` listing every violation.
    """
    errors: list[str] = []
    pairs = _split_lines(text, errors)
    named = pairs.pop("scenario", None)
    if scenario is None:
        scenario = named
    elif named is not None and named != scenario:
        errors.append(f"scenario: file names '{named}' but '{scenario}' was requested")
    if scenario not in SCENARIOS:
        raise ConfigError(errors + [f"scenario: unknown scenario {scenario!r}; "
                                    f"expected one of {', '.join(SCENARIOS)}"])
    table = {p.name: p for p in SCENARIOS[scenario]}
    for key in pairs:
        if key not in table:
            errors.append(f"{key}: unknown key for scenario '{scenario}'")

    params: dict[str, Any] = {}
    notes: list[str] = []
    for name, p in table.items():
        if name not in pairs:
            params[name] = p.default
            continue
        try:
            value = _convert(p, pairs[name])
        except ValueError as exc:
            errors.append(f"{name}: {exc} (got {pairs[name]!r})")
            continue
        if p.check is not None and value != "auto" and not p.check(value):
            errors.append(f"{name}: {p.rule} (got {pairs[name]})")
            continue
        params[name] = value

    if scenario == "classify" and params.get("input") is None:
        errors.append("input: required for scenario 'classify'")
    if scenario == "collide" and "c1" in params and "c2" in params and not params["c1"] < params["c2"]:
        errors.append("c1: must be smaller than c2")
    if scenario == "dispersion-table" and "k_min" in params and "k_max" in params \
            and not params["k_min"] < params["k_max"]:
        errors.append("k_min: must be smaller than k_max")
    if errors:
        raise ConfigError(errors)

    n_requested = params.get("n")
    if n_requested is not None:
        used = max(8, next_power_of_two(n_requested))
        if used != n_requested:
            notes.append(f"grid size n={n_requested} rounded up to {used} "
                         "(power of two required by the FFT)")
            params["n"] = used
    cfg = ScenarioConfig(scenario, params, notes=notes, n_requested=n_requested)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def load_config(path: str | Path | None, scenario: str, **overrides) -> ScenarioConfig:
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return parse_config(text, scenario, **overrides)
