"""``qcurve-lab``: run one entropy scenario and write series, snapshots and a report.

Exit status: 0 on success, 1 for configuration errors, 2 when a runtime guard
(periodic-domain margin or momentum aliasing) trips.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import SCENARIOS, ConfigError, ScenarioConfig, load_config
from .dispersion import (
    AliasingError,
    CoherentStateParams,
    DispersionModel,
    coherent_state,
    group_velocity,
    hessian,
    hessian_eigenvalues_3d,
    omega,
)
from .entropy import differential_entropy
from .numerics import DomainGuardError, make_grid
from .output import read_table, write_json, write_table
from .qcurve import (
    ExactDispersion,
    FiniteLevel,
    QCurve,
    TaylorDispersion,
    make_decreasing_from_coherent,
    sample_entropy_series,
)
from .series import EntropySeries, classify, decrease_onset
from .transitions import (
    MultiLevelSystem,
    TwoLevelSystem,
    harmonic_basis,
    multistate_probability,
    oscillation_period,
    transition_densities,
    transition_probability,
    two_level_spectrum,
)
from .twoparticle import CollisionParams, collision_scenario

__all__ = ["main", "run", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2


class Outcome:
    """Tables, report entries and the block label produced by one scenario."""

    def __init__(self):
        self.tables: list[tuple[str, dict]] = []
        self.results: dict = {}
        self.label = None
        self.propagator: str | None = None


def _model(p) -> DispersionModel:
    return DispersionModel(c=p["c"], hbar_over_m=p["hbar_over_m"])


def _series_columns(s: EntropySeries) -> dict:
    return {"t": s.times, "s_r": s.s_r, "s_k": s.s_k, "s_total": s.values}


def _run_coherent(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    grid, model = make_grid(p["n"], p["length"]), _model(p)
    params = CoherentStateParams(p["r0"], p["k0"], p["sigma2"])
    if cfg.scenario == "coherent":
        w = coherent_state(params, grid)
        evo = ExactDispersion(model) if p["propagator"] == "exact" else TaylorDispersion(model, p["k0"])
        q = QCurve(w, evo, 0.0, p["t_max"], p["n_steps"])
    else:
        q = make_decreasing_from_coherent(params, model, p["t_max"], grid, p["n_steps"])
    s = sample_entropy_series(q, guard=True)
    out.propagator = q.evolution.name
    out.tables.append(("series", _series_columns(s)))
    out.label = classify(s, p["eps"])
    out.results.update(
        s_initial=float(s.values[0]),
        s_final=float(s.values[-1]),
        s_k_variation=float(np.ptp(s.s_k)),
        minimum_uncertainty_entropy=float(1.0 + np.log(np.pi)),
    )


def _run_dispersion_table(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    model = _model(p)
    k = np.linspace(p["k_min"], p["k_max"], p["n_k"])
    lam1, lam23 = hessian_eigenvalues_3d(np.abs(k), model)
    out.tables.append(("dispersion", {
        "k": k, "omega": omega(k, model), "group_velocity": group_velocity(k, model),
        "hessian": hessian(k, model), "lambda1": lam1, "lambda23": lam23,
    }))
    out.results["rest_frequency"] = float(omega(0.0, model))


def _basis_series(cfg: ScenarioConfig, system: MultiLevelSystem, t_max: float, out: Outcome):
    p = cfg.params
    grid = make_grid(p["n"], p["length"])
    basis = harmonic_basis(grid, system.dim, p["basis_width"])
    initial = np.zeros(system.dim)
    initial[0] = 1.0
    q = QCurve(initial, FiniteLevel(system, basis), 0.0, t_max, p["n_steps"])
    s = sample_entropy_series(q)
    out.propagator = q.evolution.name
    out.tables.append(("series", _series_columns(s)))
    out.label = classify(s, p["eps"])
    return s, basis


def _run_two_state(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    sys2 = TwoLevelSystem(p["omega1"], p["omega2"], p["w11"], p["w12"], p["w22"])
    sp = two_level_spectrum(sys2)
    if p["t_max"] == "auto":
        if sp.eta == 0:
            raise ConfigError(["t_max: 'auto' needs a non-degenerate system (eta > 0)"])
        p["t_max"] = 2.0 * np.pi / sp.eta
    s, basis = _basis_series(cfg, MultiLevelSystem.from_two_level(sys2), p["t_max"], out)
    p_excited = transition_probability(sys2, s.times)
    out.tables.append(("probabilities", {"t": s.times, "p_0": 1.0 - p_excited, "p_1": p_excited}))
    out.results.update(eta=sp.eta, lambda_plus=sp.lambda_plus, lambda_minus=sp.lambda_minus,
                       theta=sp.theta, peak_probability=4.0 * p["w12"] ** 2 / sp.eta**2
                       if sp.eta else 0.0)
    if sp.eta > 0:
        period = oscillation_period(sys2)

        def entropy_at(t):
            rx, rk = transition_densities(sys2, basis, t)
            return differential_entropy(rx) + differential_entropy(rk)

        s0 = entropy_at(0.0)
        out.results.update(
            period_T=period,
            full_period=2.0 * period,
            recurrence_gap_at_T=abs(entropy_at(period) - s0),
            recurrence_gap_at_2T=abs(entropy_at(2.0 * period) - s0),
        )


def _random_hamiltonian(p, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = p["dim"]
    off = rng.normal(size=(n, n)) * p["coupling"]
    h = np.diag(p["level_spacing"] * np.arange(1, n + 1)) + 0.5 * (off + off.T)
    return h


def _run_multi_state(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    if cfg.seed is not None:
        p["seed"] = cfg.seed
    system = MultiLevelSystem(_random_hamiltonian(p, p["seed"]))
    s, _ = _basis_series(cfg, system, p["t_max"], out)
    probs = {f"p_{j}": multistate_probability(system, j, s.times) for j in range(system.dim)}
    out.tables.append(("probabilities", {"t": s.times, **probs}))
    out.results.update(eigenvalues=system.eigenvalues.tolist(), hamiltonian=system.hmat.tolist())


def _run_collide(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    cp = CollisionParams(
        k1=p["k1"], c1=p["c1"], c2=p["c2"], sigma2=p["sigma2"], model=_model(p),
        t_max=p["t_max"], n_steps=p["n_steps"], stats=p["stats"], n=p["n"],
        length=p["length"], snapshot_stride=p["snapshot_stride"],
    )
    res = collision_scenario(cp, max_workers=p["workers"])
    s = res.series
    out.propagator = "exact"
    out.tables.append(("series", _series_columns(s)))
    step = p["snapshot_decimate"]
    for t, rho in res.snapshots.items():
        axis = rho.axis[::step]
        x1, x2 = np.meshgrid(axis, axis, indexing="ij")
        out.tables.append((f"snapshots_{t:g}", {
            "x1": x1.ravel(), "x2": x2.ravel(), "rho": rho.values[::step, ::step].ravel(),
        }))
    out.label = classify(s, p["eps"])
    running = np.maximum.accumulate(s.values)
    out.results.update(
        decrease_onset=decrease_onset(s, p["eps"]),
        max_drop_below_running_max=float(np.max(running - s.values)),
        max_fermion_diagonal=float(res.diagonal_max.max()),
        min_separation=float(res.separation.min()),
        snapshot_times=sorted(res.snapshots),
    )


def _run_classify(cfg: ScenarioConfig, out: Outcome):
    p = cfg.params
    path = Path(p["input"])
    if not path.exists():
        raise ConfigError([f"input: file not found: {path}"])
    table = read_table(path)
    for col in ("t", p["column"]):
        if col not in table:
            raise ConfigError([f"column: '{col}' not present in {path}"])
    s = EntropySeries(table["t"], table[p["column"]])
    out.label = classify(s, p["eps"])
    out.results["n_samples"] = len(s)


RUNNERS = {
    "coherent": _run_coherent,
    "decreasing": _run_coherent,
    "dispersion-table": _run_dispersion_table,
    "two-state": _run_two_state,
    "multi-state": _run_multi_state,
    "collide": _run_collide,
    "classify": _run_classify,
}


def run(cfg: ScenarioConfig) -> dict:
    """Execute a validated scenario and write its files; returns the report."""
    started = time.perf_counter()
    out = Outcome()
    RUNNERS[cfg.scenario](cfg, out)
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)

    meta = {**cfg.echo(), "propagator": out.propagator or "none",
            "format_version": 1, "package_version": __version__}
    files = [write_table(outdir / name, cols, meta, cfg.format).name for name, cols in out.tables]
    report = {
        "scenario": cfg.scenario,
        "block": out.label.as_dict() if out.label else None,
        "results": out.results,
        "metadata": {
            "config": cfg.echo(),
            "propagator": out.propagator,
            "grid": {"n_requested": cfg.n_requested, "n_used": cfg.params.get("n")}
            if "n" in cfg.params else None,
            "notes": cfg.notes,
            "package_version": __version__,
            "seed": cfg.params.get("seed", cfg.seed),
        },
        "files": files,
        "runtime_seconds": time.perf_counter() - started,
    }
    write_json(outdir / "report.json", report)
    return report


def _scenario_help(name: str) -> str:
    rows = []
    for prm in SCENARIOS[name]:
        default = "required" if prm.default is None else f"default {prm.default}"
        extra = f"; one of {', '.join(prm.choices)}" if prm.choices else ""
        rule = f"; {prm.rule}" if prm.rule else ""
        rows.append(f"  {prm.name:<18} {prm.help} ({default}{extra}{rule})")
    return "\n".join(rows)


def build_parser() -> argparse.ArgumentParser:
    epilog = "\n\n".join(f"{name} parameters:\n{_scenario_help(name)}" for name in SCENARIOS)
    parser = argparse.ArgumentParser(
        prog="qcurve-lab",
        description="Phase-space entropy scenarios: coherent spreading, its time-mirrored "
                    "decrease, two- and N-level transitions, and two-fermion collisions.",
        epilog="Config files hold 'key = value' lines with '#' comments.\n\n" + epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="<scenario>")
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=f"run the '{name}' scenario",
                            description=f"Parameters accepted in the config file:\n{_scenario_help(name)}",
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", type=Path, help="scenario configuration file")
        sp.add_argument("--out", type=Path, default=None, help="output directory (default ./<scenario>-run)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=None, help="seed for randomized scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.scenario,
                          output=args.out or Path(f"{args.scenario}-run"),
                          format=args.format, seed=args.seed)
        report = run(cfg)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainGuardError as exc:
        print(f"guard violation (t={exc.t}): {exc}", file=sys.stderr)
        return EXIT_GUARD
    except AliasingError as exc:
        print(f"guard violation (t=0): {exc}", file=sys.stderr)
        return EXIT_GUARD
    label = report["block"]["kind"] if report["block"] else "-"
    print(f"{cfg.scenario}: block {label}; wrote {', '.join(report['files'] + ['report.json'])} "
          f"to {cfg.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
