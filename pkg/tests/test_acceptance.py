"""Acceptance criteria, one pass/fail line each (see the summary section of a pytest run)."""
import time

import mpmath
import numpy as np
import pytest

from oracles import propagator_oracle, random_symmetric
from qcurve_lab.cli import main
from qcurve_lab.dispersion import (
    CoherentStateParams,
    DispersionModel,
    coherent_state,
    group_velocity,
    hessian,
    hessian_matrix,
    omega,
    propagate_taylor,
)
from qcurve_lab.entropy import gaussian_entropy_closed_form, phase_space_entropy
from qcurve_lab.numerics import make_grid
from qcurve_lab.qcurve import (
    Block,
    ExactDispersion,
    FiniteLevel,
    QCurve,
    TaylorDispersion,
    classify,
    decrease_onset,
    make_decreasing_from_coherent,
    sample_entropy_series,
)
from qcurve_lab.transitions import (
    MultiLevelSystem,
    TwoLevelSystem,
    fermi_approximation,
    harmonic_basis,
    multistate_coefficients,
    multistate_probability,
    transition_coefficients,
    transition_probability,
    two_level_spectrum,
)
from qcurve_lab.twoparticle import CollisionParams, collision_scenario

UNIT = DispersionModel()
MIN_1D = 1.0 + np.log(np.pi)


def test_criterion_01_closed_form_anchor(verdict):
    s = gaussian_entropy_closed_form(np.eye(3), hessian_matrix([0.3, -0.2, 0.5], UNIT), 0.0)
    # the quoted decimal 6.434189 is 3(1 + ln pi) = 6.43418966 truncated, so it is checked
    # to its own six places and the formula to 1e-9
    verdict(1, "closed-form anchor", [(f"S(0, d=3) = {s:.9f}", abs(s - 6.434189) < 1e-6
                                       and abs(s - 3 * MIN_1D) < 1e-9)])


def test_criterion_02_03_grid_vs_closed_form(verdict):
    started = time.perf_counter()
    grid = make_grid(1024, 100.0)
    w = coherent_state(CoherentStateParams(0.0, 0.0, 1.0), grid)
    h0 = hessian(0.0, UNIT)
    checks = []
    for t in (0.0, 2.5, 5.0, 10.0):
        s = phase_space_entropy(propagate_taylor(w, t, UNIT, 0.0)).total
        closed = MIN_1D + 0.5 * np.log1p(t**2 * h0**2)
        checks.append((f"t={t:g} |grid-closed|={abs(s - closed):.1e}", abs(s - closed) < 1e-2))
    elapsed = time.perf_counter() - started
    checks.append((f"runtime {elapsed:.2f}s", elapsed < 5))
    verdict(2, "grid vs closed form (quadratic dispersion transform)", checks)

    spreads = []
    for evo in (ExactDispersion(UNIT), TaylorDispersion(UNIT, 0.0)):
        s = sample_entropy_series(QCurve(w, evo, 0.0, 10.0, 41))
        spreads.append((f"{s.meta['propagator']} s_k range={np.ptp(s.s_k):.1e}", np.ptp(s.s_k) < 1e-12))
    verdict(3, "momentum entropy conserved", spreads)


def test_criterion_04_two_state_exactness(verdict):
    rng = np.random.default_rng(2024)
    t = np.linspace(0.0, 20.0, 101)
    worst_p = worst_u = 0.0
    for _ in range(100):
        o1, o2 = rng.uniform(0.0, 5.0, 2)
        w11, w12, w22 = rng.normal(scale=0.5, size=3)
        sys = TwoLevelSystem(o1, o2, w11, w12, w22)
        oracle = np.array([abs(propagator_oracle(sys.matrix(), ti)[1, 0]) ** 2 for ti in t])
        worst_p = max(worst_p, np.max(np.abs(transition_probability(sys, t) - oracle)))
        a1, a2 = transition_coefficients(sys, t)
        worst_u = max(worst_u, np.max(np.abs(np.abs(a1) ** 2 + np.abs(a2) ** 2 - 1)))
    anchor = TwoLevelSystem(1.0, 2.0, w12=0.1)
    peak = float(transition_probability(anchor, np.pi / two_level_spectrum(anchor).eta))
    verdict(4, "two-state exactness", [
        (f"100 systems max|P - oracle|={worst_p:.1e}", worst_p < 1e-10),
        (f"unitarity {worst_u:.1e}", worst_u < 1e-12),
        (f"peak at pi/eta = {peak:.10f}", abs(peak - 0.04 / 1.04) < 1e-12),
    ])


def test_criterion_05_golden_rule_regime(verdict):
    t = np.linspace(0.0, 10.0, 2001)
    weak = TwoLevelSystem(1.0, 10.0, w12=0.01)
    dev = np.max(np.abs(transition_probability(weak, t) - fermi_approximation(weak, t)))
    # near resonance the approximation overshoots far past the exact amplitude
    near = TwoLevelSystem(1.0, 1.05, w12=0.1)
    t_long = np.linspace(0.0, 100.0, 20001)
    breakdown = np.max(np.abs(transition_probability(near, t_long) - fermi_approximation(near, t_long)))
    verdict(5, "golden-rule regime", [
        (f"off resonance max dev={dev:.1e}", dev < 1e-4),
        (f"near resonance (omega2=1.05, w12=0.1) max dev={breakdown:.2f}", breakdown > 0.5),
    ])


def test_criterion_06_n_state_exactness(verdict):
    sys = MultiLevelSystem(random_symmetric(np.random.default_rng(5), 5))
    times = np.linspace(0.0, 20.0, 50)
    worst = norm = 0.0
    for t in times:
        u = propagator_oracle(sys.hmat, t)
        p = np.array([multistate_probability(sys, j, t) for j in range(5)])
        worst = max(worst, np.max(np.abs(p - np.abs(u[:, 0]) ** 2)))
        a = np.array([multistate_coefficients(sys, j, t) for j in range(5)])
        norm = max(norm, abs(np.sum(np.abs(a) ** 2) - 1))
    verdict(6, "N-state exactness", [(f"max|P - oracle|={worst:.1e}", worst < 1e-8),
                                      (f"norm {norm:.1e}", norm < 1e-10)])


def test_criterion_07_block_suite(verdict):
    started = time.perf_counter()
    grid = make_grid(1024, 100.0)
    small = make_grid(256, 20.0)
    params = CoherentStateParams(0.0, 0.0, 1.0)

    system = MultiLevelSystem(random_symmetric(np.random.default_rng(11), 4))
    evo = FiniteLevel(system, harmonic_basis(small, 4))
    eig = classify(sample_entropy_series(QCurve(system.eigenvectors[:, 1], evo, 0.0, 20.0, 64)))

    inc = sample_entropy_series(QCurve(coherent_state(params, grid), ExactDispersion(UNIT), 0.0, 10.0, 64))
    dec = sample_entropy_series(make_decreasing_from_coherent(params, UNIT, 10.0, grid, 64))
    mirror = float(np.max(np.abs(dec.values - inc.reversed_values())))

    sys2 = TwoLevelSystem(1.0, 2.0, w12=0.1)
    evo2 = FiniteLevel(MultiLevelSystem.from_two_level(sys2), harmonic_basis(small, 2))
    full = 2 * np.pi / two_level_spectrum(sys2).eta
    osc = classify(sample_entropy_series(QCurve(np.array([1.0, 0.0]), evo2, 0.0, full, 201)))
    elapsed = time.perf_counter() - started
    verdict(7, "block classification", [
        (f"eigenstate -> {eig.kind.value}", eig.kind is Block.CONSTANT),
        (f"coherent -> {classify(inc).kind.value}", classify(inc).kind is Block.INCREASING),
        (f"conjugated -> {classify(dec).kind.value}", classify(dec).kind is Block.DECREASING),
        (f"mirror max dev={mirror:.1e}", mirror < 1e-6),
        (f"two-state full period -> {osc.kind.value}", osc.kind is Block.OSCILLATING),
        (f"runtime {elapsed:.1f}s", elapsed < 30),
    ])


@pytest.mark.slow
def test_criterion_08_collision(verdict):
    started = time.perf_counter()
    regimes = {
        "a": CollisionParams(k1=1.0, model=DispersionModel(hbar_over_m=1.0)),
        "b": CollisionParams(k1=1.0, model=DispersionModel(hbar_over_m=0.5)),
        "c": CollisionParams(k1=2.0, model=DispersionModel(hbar_over_m=0.5)),
    }
    runs = {key: collision_scenario(p, max_workers=4) for key, p in regimes.items()}
    checks = []
    r = runs["a"]
    s = r.series
    far = r.separation > 10 * r.width
    n_far = int(np.argmin(far)) if not far.all() else len(far)
    rising = bool(np.all(np.diff(s.values[:n_far]) > 0))
    checks.append((f"(a) strictly rising over {n_far} far-apart samples", rising and n_far >= 8))
    running = np.maximum.accumulate(s.values)
    drop = float(np.max(running - s.values))
    checks.append((f"(b) max drop below running max {drop:.3f} nats", drop > 0.05))
    diag = max(float(np.max(x.diagonal_max)) for x in runs.values())
    checks.append((f"(c) fermion diagonal max {diag:.1e}", diag < 1e-12))
    onset = {key: decrease_onset(x.series) for key, x in runs.items()}
    ordered = None not in onset.values() and onset["b"] > onset["a"] and onset["c"] < onset["b"]
    checks.append((f"(d) onsets a={onset['a']} b={onset['b']} c={onset['c']}", ordered))
    labels = {key: classify(x.series).kind.value for key, x in runs.items()}
    checks.append((f"labels {labels}", set(labels.values()) == {"O"}))
    elapsed = time.perf_counter() - started
    checks.append((f"runtime {elapsed:.0f}s", elapsed < 300))
    verdict(8, "fermion collision", checks)


def _mp_omega(k, c, hm):
    c, hm = mpmath.mpf(c), mpmath.mpf(hm)
    return c * mpmath.sqrt(k**2 + (c / hm) ** 2)


def test_criterion_09_derivatives(verdict):
    ks = np.linspace(-10.0, 10.0, 81)
    checks = []
    for c, hm in ((1.0, 1.0), (3.0, 0.5)):
        model = DispersionModel(c=c, hbar_over_m=hm)
        h = 1e-5
        fd_v = (omega(ks + h, model) - omega(ks - h, model)) / (2 * h)
        rel_v = np.max(np.abs(fd_v - group_velocity(ks, model)) / np.maximum(np.abs(group_velocity(ks, model)), 1e-300)
                       * (ks != 0)) + np.max(np.abs(fd_v[ks == 0]))
        # second differences at h=1e-5 lose ~10 digits in float64: use 40 digits there,
        # and a wide five-point stencil on the float64 omega as a second route
        with mpmath.workdps(40):
            mh = mpmath.mpf(h)
            fd_h = np.array([float((_mp_omega(mpmath.mpf(k) + mh, c, hm) - 2 * _mp_omega(mpmath.mpf(k), c, hm)
                                    + _mp_omega(mpmath.mpf(k) - mh, c, hm)) / mh**2) for k in ks])
        hw = 1e-2
        o = lambda d: omega(ks + d, model)  # noqa: E731
        five = (-o(2 * hw) + 16 * o(hw) - 30 * o(0) + 16 * o(-hw) - o(-2 * hw)) / (12 * hw**2)
        exact = hessian(ks, model)
        rel_h = np.max(np.abs(fd_h - exact) / exact)
        rel_5 = np.max(np.abs(five - exact) / exact)
        tag = f"c={c:g}, hbar/m={hm:g}"
        checks += [(f"{tag} v_g rel {rel_v:.1e}", rel_v < 1e-6),
                   (f"{tag} hessian rel {rel_h:.1e} (40-digit) / {rel_5:.1e} (five-point)",
                    rel_h < 1e-6 and rel_5 < 1e-6)]
    verdict(9, "dispersion derivatives", checks)


@pytest.mark.slow
def test_criterion_10_determinism(verdict, tmp_path):
    configs = {
        "coherent": "", "decreasing": "", "dispersion-table": "", "two-state": "",
        "multi-state": "dim = 6\n",
        "collide": "n = 256\nlength = 120\nc1 = -12\nc2 = 12\nt_max = 30\nn_steps = 31\nsnapshot_stride = 10\n",
    }
    checks = []
    for scenario, text in configs.items():
        cfg = tmp_path / f"{scenario}.cfg"
        cfg.write_text(text, encoding="utf-8")
        outs = []
        for rep in ("first", "second"):
            out = tmp_path / f"{scenario}-{rep}"
            assert main([scenario, "--config", str(cfg), "--out", str(out), "--seed", "3"]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        checks.append((f"{scenario} ({len(outs[0])} csv)", bool(outs[0]) and outs[0] == outs[1]))
    verdict(10, "byte-identical CSV", checks)
