import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcurve_lab.dispersion import CoherentStateParams, DispersionModel, coherent_state
from qcurve_lab.entropy import differential_entropy, joint_entropy_2d, phase_space_entropy
from qcurve_lab.numerics import DomainGuardError, WaveFunction, make_grid, to_momentum
from qcurve_lab.transitions import harmonic_basis
from qcurve_lab.twoparticle import (
    CollisionParams,
    Statistics,
    collision_scenario,
    evolve_pair,
    joint_density_momentum,
    joint_density_position,
    make_two_particle,
    two_particle_entropy,
)

GRID = make_grid(128, 30.0)


def packet(center, k0=0.0, sigma2=1.0, grid=GRID):
    return coherent_state(CoherentStateParams(center, k0, sigma2), grid)


def random_state(rng, grid=GRID):
    x = grid.positions
    amp = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    return WaveFunction.from_position(grid, amp * np.exp(-x**2 / 20))


def brute_force_amplitude(s):
    """Full n x n (anti)symmetrized amplitude in position space."""
    a, b = s.psi1.amp_x, s.psi2.amp_x
    return (np.outer(a, b) + s.stats.sign * np.outer(b, a)) / np.sqrt(s.c_t)


# -- construction ---------------------------------------------------------

def test_orthogonal_factors_give_ct_two():
    a, b = harmonic_basis(GRID, 2)
    for stats in Statistics:
        assert make_two_particle(a, b, stats).c_t == pytest.approx(2.0, abs=1e-9)


def test_identical_bosons_and_fermions():
    a = packet(0.0)
    assert make_two_particle(a, a, "boson").c_t == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ValueError):
        make_two_particle(a, a, Statistics.FERMION)
    with pytest.raises(ValueError):
        make_two_particle(a, a * np.exp(0.4j), Statistics.FERMION)


def test_statistics_signs():
    assert Statistics.FERMION.sign == -1 and Statistics.BOSON.sign == 1
    assert Statistics("fermion") is Statistics.FERMION


def test_factors_must_share_a_grid():
    with pytest.raises(ValueError):
        make_two_particle(packet(0.0), packet(0.0, grid=make_grid(128, 31.0)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Statistics)))
def test_three_term_density_matches_brute_force(seed, stats):
    rng = np.random.default_rng(seed)
    s = make_two_particle(random_state(rng), random_state(rng), stats)
    amp = brute_force_amplitude(s)
    rho_x = joint_density_position(s)
    np.testing.assert_allclose(rho_x.values, np.abs(amp) ** 2, atol=1e-12 * np.abs(amp).max() ** 2)
    # momentum side: transform the joint amplitude along both axes
    g = s.grid
    amp_k = np.array([to_momentum(row, g) for row in amp])
    amp_k = np.array([to_momentum(col, g) for col in amp_k.T]).T
    rho_k = joint_density_momentum(s)
    np.testing.assert_allclose(rho_k.values, np.abs(amp_k) ** 2, atol=1e-12 * np.abs(amp_k).max() ** 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Statistics)))
def test_joint_densities_are_symmetric_and_normalized(seed, stats):
    rng = np.random.default_rng(seed)
    s = make_two_particle(random_state(rng), random_state(rng), stats)
    for rho in (joint_density_position(s), joint_density_momentum(s)):
        np.testing.assert_array_equal(rho.values, rho.values.T)
        assert abs(rho.mass() - 1) < 1e-8
        assert rho.values.min() >= 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fermion_diagonal_vanishes(seed):
    rng = np.random.default_rng(seed)
    s = make_two_particle(random_state(rng), random_state(rng), Statistics.FERMION)
    assert np.max(np.diag(joint_density_position(s).values)) < 1e-12
    assert np.max(np.diag(joint_density_momentum(s).values)) < 1e-12


def test_distant_packets_reduce_to_symmetrized_product():
    a, b = packet(-8.0), packet(8.0)
    for stats in Statistics:
        rho = joint_density_position(make_two_particle(a, b, stats)).values
        r1, r2 = a.position_density().values, b.position_density().values
        expected = (np.outer(r1, r2) + np.outer(r2, r1)) / 2
        assert np.max(np.abs(rho - expected)) < 1e-8


def test_identical_bosons_give_product_density():
    a = packet(1.0, 0.5)
    s = make_two_particle(a, a, Statistics.BOSON)
    r = a.position_density().values
    np.testing.assert_allclose(joint_density_position(s).values, np.outer(r, r), rtol=1e-12, atol=1e-16)
    rk = a.momentum_density().values
    np.testing.assert_allclose(joint_density_momentum(s).values, np.outer(rk, rk), rtol=1e-12, atol=1e-16)
    s_pair = two_particle_entropy(s).total
    assert s_pair == pytest.approx(2 * phase_space_entropy(a).total, abs=1e-6)


def test_counter_propagating_momentum_lobes():
    g = make_grid(512, 80.0)
    s = make_two_particle(packet(-10.0, 3.0, grid=g), packet(10.0, -3.0, grid=g))
    rho = joint_density_momentum(s)
    k = g.momenta
    upper = k[:, None] > k[None, :]
    w = rho.values * rho.weight
    for mask, (c1, c2) in ((upper, (3.0, -3.0)), (~upper, (-3.0, 3.0))):
        m = w * mask
        mass = m.sum()
        assert mass == pytest.approx(0.5, abs=1e-6)
        assert np.sum(m * k[:, None]) / mass == pytest.approx(c1, abs=1e-6)
        assert np.sum(m * k[None, :]) / mass == pytest.approx(c2, abs=1e-6)


@pytest.mark.parametrize("stats", list(Statistics))
def test_far_separated_pair_adds_two_log_two(stats):
    # disjoint lobes in both position and momentum
    g = make_grid(512, 80.0)
    a, b = packet(-10.0, 3.0, grid=g), packet(10.0, -3.0, grid=g)
    s = two_particle_entropy(make_two_particle(a, b, stats)).total
    single = phase_space_entropy(a).total + phase_space_entropy(b).total
    assert s == pytest.approx(single + 2 * np.log(2), abs=5e-2)


def test_entropy_ignores_label_swap():
    rng = np.random.default_rng(5)
    a, b = random_state(rng), random_state(rng)
    for stats in Statistics:
        s_ab = two_particle_entropy(make_two_particle(a, b, stats))
        s_ba = two_particle_entropy(make_two_particle(b, a, stats))
        assert s_ab.total == pytest.approx(s_ba.total, abs=1e-12)


def test_joint_entropy_is_position_plus_momentum():
    rng = np.random.default_rng(6)
    s = make_two_particle(random_state(rng), random_state(rng))
    e = two_particle_entropy(s)
    assert e.s_r == joint_entropy_2d(joint_density_position(s))
    assert e.s_k == joint_entropy_2d(joint_density_momentum(s))


def test_evolve_pair_keeps_overlap_and_momentum_entropy():
    # both factors share one unitary evolution, so their overlap and hence
    # the recomputed normalization stay fixed
    g = make_grid(512, 120.0)
    model = DispersionModel()
    s = make_two_particle(packet(-1.0, 1.0, grid=g), packet(1.0, -0.5, grid=g))
    assert s.c_t < 2.0 - 1e-2
    for t in (3.0, 8.0, 15.0):
        later = evolve_pair(s, t, model)
        assert later.c_t == pytest.approx(s.c_t, abs=1e-12)
        assert differential_entropy(later.psi1.momentum_density()) == pytest.approx(
            differential_entropy(s.psi1.momentum_density()), abs=1e-12)


# -- collision scenario (small lattice; the full run lives in the acceptance suite) --

SMALL = dict(c1=-12.0, c2=12.0, n=256, length=120.0, t_max=30.0, n_steps=31, snapshot_stride=10.0)


@pytest.fixture(scope="module")
def small_collision():
    return collision_scenario(CollisionParams(**SMALL))


def test_collision_outputs(small_collision):
    r = small_collision
    s = r.series
    assert len(s.times) == 31 and s.times[0] == 0 and s.times[-1] == 30
    assert sorted(r.snapshots) == [0.0, 10.0, 20.0, 30.0]
    assert np.max(r.diagonal_max) < 1e-12
    assert s.meta["propagator"] == "exact" and s.meta["stats"] == "fermion"
    np.testing.assert_allclose(s.values, s.s_r + s.s_k, rtol=0, atol=0)
    # free evolution conserves each factor's momentum density, and with it the
    # joint momentum density of the pair
    assert np.ptp(s.s_k) < 1e-9
    snap = r.snapshots[10.0]
    assert snap.values.shape == (256, 256) and abs(snap.mass() - 1) < 1e-8


def test_collision_is_thread_count_independent(small_collision):
    again = collision_scenario(CollisionParams(**SMALL), max_workers=4)
    np.testing.assert_array_equal(again.series.values, small_collision.series.values)


def test_collision_guard_reports_time():
    with pytest.raises(DomainGuardError) as info:
        collision_scenario(CollisionParams(**{**SMALL, "length": 60.0, "t_max": 60.0, "n_steps": 13}))
    assert info.value.t is not None and info.value.t > 0


@pytest.mark.parametrize("bad", [dict(n_steps=5), dict(t_max=0.0), dict(c1=5.0, c2=-5.0), dict(sigma2=0.0)])
def test_collision_params_validation(bad):
    with pytest.raises(ValueError):
        CollisionParams(**{**SMALL, **bad})
