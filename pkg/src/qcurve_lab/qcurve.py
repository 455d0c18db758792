"""Evolution paths (initial state, propagator, interval) and their entropy series."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dispersion import (
    CoherentStateParams,
    DispersionModel,
    coherent_state,
    conjugate,
    propagate_exact,
    propagate_taylor,
)
from .entropy import EntropyValue, phase_space_entropy
from .numerics import Grid, WaveFunction, check_in_domain, moments
from .series import DEFAULT_EPS, Block, BlockLabel, EntropySeries, classify, decrease_onset
from .transitions import MultiLevelSystem, superpose
from .twoparticle import TwoParticleState, evolve_pair, two_particle_entropy

__all__ = [
    "ExactDispersion",
    "TaylorDispersion",
    "FiniteLevel",
    "QCurve",
    "sample_entropy_series",
    "make_decreasing_from_coherent",
    "EntropySeries",
    "Block",
    "BlockLabel",
    "classify",
    "decrease_onset",
    "DEFAULT_EPS",
]


@dataclass(frozen=True)
class ExactDispersion:
    """Free relativistic evolution applied exactly in momentum space."""

    model: DispersionModel

    name = "exact"

    def evolve(self, state, t: float):
        if isinstance(state, TwoParticleState):
            return evolve_pair(state, t, self.model)
        if isinstance(state, WaveFunction):
            return propagate_exact(state, t, self.model)
        raise TypeError(f"cannot evolve {type(state).__name__} with the dispersion propagator")

    def entropy(self, state) -> EntropyValue:
        if isinstance(state, TwoParticleState):
            return two_particle_entropy(state)
        return phase_space_entropy(state)


@dataclass(frozen=True)
class TaylorDispersion:
    """Second-order dispersion transform about ``k0`` (momentum mean if None)."""

    model: DispersionModel
    k0: float | None = None

    name = "taylor"

    def evolve(self, state, t: float):
        if not isinstance(state, WaveFunction):
            raise TypeError("the dispersion transform acts on single-particle states")
        k0 = self.k0 if self.k0 is not None else moments(state.momentum_density())[0]
        return propagate_taylor(state, t, self.model, k0)

    def entropy(self, state) -> EntropyValue:
        return phase_space_entropy(state)


@dataclass(frozen=True, eq=False)
class FiniteLevel:
    """Evolution under a finite-level ``H'/hbar`` in a basis of lattice functions.

    The state is a coefficient vector; its entropy is that of
    ``sum_j c_j basis[j]``.
    """

    system: MultiLevelSystem
    basis: tuple

    name = "finite-level"

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if len(self.basis) != self.system.dim:
            raise ValueError(f"{len(self.basis)} basis functions for an N={self.system.dim} system")

    def evolve(self, state, t: float):
        coeffs = np.asarray(state, dtype=complex)
        if coeffs.shape != (self.system.dim,):
            raise TypeError(f"expected a coefficient vector of length {self.system.dim}")
        return self.system.evolve(coeffs, t)

    def entropy(self, state) -> EntropyValue:
        return phase_space_entropy(superpose(state, self.basis))


@dataclass(frozen=True, eq=False)
class QCurve:
    initial: object
    evolution: object
    t0: float
    t1: float
    n_samples: int = 64

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if self.n_samples < 8:
            raise ValueError(f"n_samples must be at least 8, got {self.n_samples}")
        self.evolution.evolve(self.initial, 0.0)  # rejects incompatible state kinds early

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_samples)

    def state_at(self, t: float):
        return self.evolution.evolve(self.initial, t - self.t0)


def _guard(state, t: float):
    if isinstance(state, WaveFunction):
        check_in_domain(state, strict=True, t=t)
    elif isinstance(state, TwoParticleState):
        check_in_domain(state.psi1, strict=True, t=t)
        check_in_domain(state.psi2, strict=True, t=t)


def sample_entropy_series(q: QCurve, max_workers: int | None = None,
                          guard: bool = False) -> EntropySeries:
    """Entropy at ``n_samples`` equally spaced times in ``[t0, t1]``.

    Every sample evolves the initial state directly, so samples can run
    concurrently. With ``guard`` set, a lattice packet drifting within five
    standard deviations of the periodic edge raises ``DomainGuardError``.
    """
    times = q.times()

    def one(t):
        state = q.state_at(float(t))
        if guard:
            _guard(state, float(t))
        return q.evolution.entropy(state)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            vals = list(pool.map(one, times))
    else:
        vals = [one(t) for t in times]
    s_r = np.array([v.s_r for v in vals])
    s_k = np.array([v.s_k for v in vals])
    meta = {"propagator": getattr(q.evolution, "name", type(q.evolution).__name__),
            "t0": q.t0, "t1": q.t1, "n_samples": q.n_samples}
    return EntropySeries(times, s_r + s_k, s_r, s_k, meta)


def make_decreasing_from_coherent(params: CoherentStateParams, model: DispersionModel,
                                  T: float, grid: Grid, n_samples: int = 64) -> QCurve:
    """Conjugate a coherent packet evolved for ``T``; its entropy falls over ``[0, T]``."""
    if not T > 0:
        raise ValueError("T must be positive")
    start = coherent_state(params, grid)
    final = propagate_exact(start, T, model)
    check_in_domain(final, strict=True, t=T)
    return QCurve(conjugate(final), ExactDispersion(model), 0.0, float(T), n_samples)
