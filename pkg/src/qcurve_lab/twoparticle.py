"""Exchange-symmetrized two-particle states and the head-on collision scenario."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dispersion import CoherentStateParams, DispersionModel, coherent_state, propagate_exact
from .entropy import EntropyValue, joint_entropy_2d
from .numerics import Grid, WaveFunction, check_in_domain, inner_product, make_grid, moments
from .series import EntropySeries

__all__ = [
    "Statistics",
    "TwoParticleState",
    "Density2D",
    "CollisionParams",
    "CollisionResult",
    "make_two_particle",
    "joint_density_position",
    "joint_density_momentum",
    "two_particle_entropy",
    "evolve_pair",
    "collision_scenario",
]

PAULI_TOL = 1e-10
NEGATIVE_TOL = 1e-12


class Statistics(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"

    @property
    def sign(self) -> int:
        """Sign in front of the exchanged product."""
        return -1 if self is Statistics.FERMION else 1


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    psi1: WaveFunction
    psi2: WaveFunction
    stats: Statistics
    c_t: float

    @property
    def grid(self) -> Grid:
        return self.psi1.grid


@dataclass(frozen=True, eq=False)
class Density2D:
    """Joint density on the ``axis x axis`` lattice with area element ``weight``."""

    values: np.ndarray = field(repr=False)
    weight: float
    axis: np.ndarray = field(repr=False)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.weight)


def make_two_particle(psi1: WaveFunction, psi2: WaveFunction,
                      stats: Statistics | str = Statistics.FERMION) -> TwoParticleState:
    stats = Statistics(stats)
    if psi1.grid != psi2.grid:
        raise ValueError("single-particle factors live on different grids")
    overlap2 = abs(inner_product(psi1, psi2)) ** 2
    if stats is Statistics.FERMION and np.sqrt(overlap2) > 1.0 - PAULI_TOL:
        raise ValueError("antisymmetrizing (nearly) identical factors gives the zero state")
    return TwoParticleState(psi1, psi2, stats, 2.0 * (1.0 + stats.sign * overlap2))


def _joint_density(f1, f2, c_t, sign, weight, axis) -> Density2D:
    p1, p2 = np.abs(f1) ** 2, np.abs(f2) ** 2
    u = f1 * np.conj(f2)
    # rho1(x1) rho2(x2) + rho1(x2) rho2(x1) +- 2 Re(u(x1) conj(u(x2)))
    values = np.outer(p1, p2)
    values += values.T
    values += (2.0 * sign) * np.real(np.outer(u, np.conj(u)))
    values /= c_t
    lo = values.min()
    if lo < -NEGATIVE_TOL:
        raise ArithmeticError(f"joint density reached {lo:.3g}, below rounding tolerance")
    np.clip(values, 0.0, None, out=values)
    values /= np.sum(values) * weight
    values.setflags(write=False)
    return Density2D(values, weight, axis)


def joint_density_position(s: TwoParticleState) -> Density2D:
    g = s.grid
    return _joint_density(s.psi1.amp_x, s.psi2.amp_x, s.c_t, s.stats.sign, g.dx**2, g.positions)


def joint_density_momentum(s: TwoParticleState) -> Density2D:
    g = s.grid
    return _joint_density(s.psi1.amp_k, s.psi2.amp_k, s.c_t, s.stats.sign, g.dk**2, g.momenta)


def two_particle_entropy(s: TwoParticleState) -> EntropyValue:
    return EntropyValue(
        joint_entropy_2d(joint_density_position(s)),
        joint_entropy_2d(joint_density_momentum(s)),
    )


def evolve_pair(s: TwoParticleState, t: float, model: DispersionModel) -> TwoParticleState:
    """Free evolution of both factors; ``c_t`` is recomputed from the new overlap."""
    return make_two_particle(propagate_exact(s.psi1, t, model),
                             propagate_exact(s.psi2, t, model), s.stats)


@dataclass(frozen=True)
class CollisionParams:
    """Two coherent packets at ``c1 < c2`` moving toward each other with ``+-k1``."""

    k1: float = 1.0
    c1: float = -30.0
    c2: float = 30.0
    sigma2: float = 1.0
    model: DispersionModel = field(default_factory=DispersionModel)
    t_max: float = 80.0
    n_steps: int = 81
    stats: Statistics = Statistics.FERMION
    n: int = 1024
    length: float = 400.0
    snapshot_stride: float | None = 20.0

    def __post_init__(self):
        object.__setattr__(self, "stats", Statistics(self.stats))
        if not self.c1 < self.c2:
            raise ValueError("c1 must lie left of c2")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")
        if self.n_steps < 8:
            raise ValueError(f"n_steps must be at least 8, got {self.n_steps}")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.snapshot_stride is not None and not self.snapshot_stride > 0:
            raise ValueError("snapshot_stride must be positive")

    def grid(self) -> Grid:
        return make_grid(self.n, self.length)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)


@dataclass(frozen=True, eq=False)
class CollisionResult:
    series: EntropySeries
    snapshots: dict
    diagonal_max: np.ndarray
    separation: np.ndarray
    width: np.ndarray


def _snapshot_times(times: np.ndarray, stride: float | None) -> set:
    if stride is None:
        return set()
    picked = {}
    for i, t in enumerate(times):
        m = int(round(t / stride))
        if abs(t - m * stride) <= 0.5 * (times[1] - times[0]) + 1e-12 and m not in picked:
            picked[m] = i
    return set(picked.values())


def collision_scenario(p: CollisionParams, max_workers: int | None = None) -> CollisionResult:
    """Entropy of the (anti)symmetrized pair sampled over ``[0, t_max]``.

    Each sample propagates the initial packets from ``t = 0``, so samples are
    independent; ``max_workers`` fans them out over threads. Raises
    :class:`~qcurve_lab.numerics.DomainGuardError` when a packet gets within
    five standard deviations of the periodic edge.
    """
    grid = p.grid()
    left = coherent_state(CoherentStateParams(p.c1, p.k1, p.sigma2), grid)
    right = coherent_state(CoherentStateParams(p.c2, -p.k1, p.sigma2), grid)
    times = p.times()
    snap_idx = _snapshot_times(times, p.snapshot_stride)

    def sample(i):
        t = float(times[i])
        a = propagate_exact(left, t, p.model)
        b = propagate_exact(right, t, p.model)
        check_in_domain(a, strict=True, t=t)
        check_in_domain(b, strict=True, t=t)
        s = make_two_particle(a, b, p.stats)
        rho_x = joint_density_position(s)
        rho_k = joint_density_momentum(s)
        (ma, sa), (mb, sb) = moments(a.position_density()), moments(b.position_density())
        return (joint_entropy_2d(rho_x), joint_entropy_2d(rho_k),
                float(np.max(np.diag(rho_x.values))), mb - ma, max(sa, sb),
                rho_x if i in snap_idx else None)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(sample, range(len(times))))
    else:
        rows = [sample(i) for i in range(len(times))]

    s_r = np.array([r[0] for r in rows])
    s_k = np.array([r[1] for r in rows])
    meta = {
        "scenario": "collide",
        "propagator": "exact",
        "k1": p.k1, "c1": p.c1, "c2": p.c2, "sigma2": p.sigma2,
        "c": p.model.c, "hbar_over_m": p.model.hbar_over_m,
        "stats": p.stats.value, "n": grid.n, "length": grid.length,
    }
    series = EntropySeries(times, s_r + s_k, s_r, s_k, meta)
    snapshots = {float(times[i]): rows[i][5] for i in sorted(snap_idx)}
    return CollisionResult(
        series,
        snapshots,
        np.array([r[2] for r in rows]),
        np.array([r[3] for r in rows]),
        np.array([r[4] for r in rows]),
    )
