"""Uniform periodic lattices and the dual position/momentum representation.

Transforms use the unitary continuum-consistent convention

    phi(k_j) = dx / sqrt(2 pi) * sum_l psi(x_l) exp(-i k_j x_l)

so that ``sum |psi|^2 dx == sum |phi|^2 dk`` holds with no extra bookkeeping.
Momenta are stored in ascending order, ``k_j = 2 pi m_j / L`` with
``m_j = -n/2 .. n/2 - 1``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainGuardError",
    "DomainWarning",
    "Grid",
    "WaveFunction",
    "Density",
    "make_grid",
    "to_momentum",
    "to_position",
    "inner_product",
    "density",
    "moments",
    "domain_margin",
    "check_in_domain",
    "next_power_of_two",
]


class DomainGuardError(RuntimeError):
    """A packet came within the guard distance of the periodic boundary."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class DomainWarning(UserWarning):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def next_power_of_two(n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True, eq=False)
class Grid:
    """Position lattice on ``[-L/2, L/2)`` and its conjugate momentum lattice."""

    n: int
    length: float
    dx: float = field(init=False)
    dk: float = field(init=False)
    positions: np.ndarray = field(init=False, repr=False)
    momenta: np.ndarray = field(init=False, repr=False)
    _mode: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {n!r}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise ValueError(f"grid length must be positive, got {self.length!r}")
        length = float(self.length)
        dx = length / n
        mode = np.arange(-n // 2, n // 2)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dk", 2.0 * np.pi / length)
        object.__setattr__(self, "positions", _frozen(-length / 2 + dx * np.arange(n)))
        object.__setattr__(self, "momenta", _frozen(2.0 * np.pi * mode / length))
        object.__setattr__(self, "_mode", _frozen(mode))

    @property
    def k_nyquist(self) -> float:
        return np.pi / self.dx

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.n == other.n and self.length == other.length

    def __hash__(self):
        return hash((self.n, self.length))


def make_grid(n: int, length: float) -> Grid:
    """Build a :class:`Grid`; ``n`` must be a power of two no smaller than 8."""
    return Grid(n, length)


def to_momentum(w: "WaveFunction | np.ndarray", grid: Grid | None = None) -> np.ndarray:
    """Unitary DFT of position amplitudes, ordered to match ``grid.momenta``."""
    if isinstance(w, WaveFunction):
        grid, amp = w.grid, w.amp_x
    else:
        amp = np.asarray(w, dtype=complex)
        if grid is None:
            raise TypeError("a grid is required when transforming a bare array")
    if amp.shape != (grid.n,):
        raise ValueError(f"amplitude shape {amp.shape} does not match grid size {grid.n}")
    scale = np.sqrt(grid.dx / grid.dk)
    # x0 = -L/2, so exp(-i k_j x0) is exactly (-1)^m_j
    sign = np.where(grid._mode % 2 == 0, 1.0, -1.0)
    return scale * sign * np.fft.fftshift(np.fft.fft(amp, norm="ortho"))


def to_position(phi: np.ndarray, grid: Grid) -> np.ndarray:
    """Exact inverse of :func:`to_momentum`."""
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (grid.n,):
        raise ValueError(f"amplitude shape {phi.shape} does not match grid size {grid.n}")
    scale = np.sqrt(grid.dk / grid.dx)
    sign = np.where(grid._mode % 2 == 0, 1.0, -1.0)
    return scale * np.fft.ifft(np.fft.ifftshift(sign * phi), norm="ortho")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Single-particle state held in both representations.

    Use :meth:`from_position` or :meth:`from_momentum` rather than the raw
    constructor; they keep ``amp_x`` and ``amp_k`` consistent.
    """

    grid: Grid
    amp_x: np.ndarray = field(repr=False)
    amp_k: np.ndarray = field(repr=False)

    @classmethod
    def from_position(cls, grid: Grid, amp_x, normalize: bool = True) -> "WaveFunction":
        amp_x = np.array(amp_x, dtype=complex)
        if amp_x.shape != (grid.n,):
            raise ValueError(f"amplitude shape {amp_x.shape} does not match grid size {grid.n}")
        if not np.all(np.isfinite(amp_x)):
            raise ValueError("amplitudes must be finite")
        if normalize:
            norm = np.sqrt(np.sum(np.abs(amp_x) ** 2) * grid.dx)
            if norm == 0:
                raise ValueError("cannot normalize a zero wave function")
            amp_x = amp_x / norm
        return cls(grid, _frozen(amp_x), _frozen(to_momentum(amp_x, grid)))

    @classmethod
    def from_momentum(cls, grid: Grid, amp_k, normalize: bool = True) -> "WaveFunction":
        amp_k = np.array(amp_k, dtype=complex)
        if amp_k.shape != (grid.n,):
            raise ValueError(f"amplitude shape {amp_k.shape} does not match grid size {grid.n}")
        if not np.all(np.isfinite(amp_k)):
            raise ValueError("amplitudes must be finite")
        if normalize:
            norm = np.sqrt(np.sum(np.abs(amp_k) ** 2) * grid.dk)
            if norm == 0:
                raise ValueError("cannot normalize a zero wave function")
            amp_k = amp_k / norm
        return cls(grid, _frozen(to_position(amp_k, grid)), _frozen(amp_k))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amp_x) ** 2) * self.grid.dx)

    def position_density(self) -> "Density":
        return density(self.amp_x, self.grid.dx, self.grid.positions)

    def momentum_density(self) -> "Density":
        return density(self.amp_k, self.grid.dk, self.grid.momenta)

    def __mul__(self, scalar) -> "WaveFunction":
        if not np.isscalar(scalar):
            return NotImplemented
        return WaveFunction(self.grid, _frozen(self.amp_x * scalar), _frozen(self.amp_k * scalar))

    __rmul__ = __mul__


def inner_product(a: WaveFunction, b: WaveFunction) -> complex:
    """``<a|b> = sum conj(a) b dx``."""
    if a.grid != b.grid:
        raise ValueError("wave functions live on different grids")
    return complex(np.vdot(a.amp_x, b.amp_x) * a.grid.dx)


@dataclass(frozen=True, eq=False)
class Density:
    """Nonnegative density on one lattice axis with its quadrature weight."""

    values: np.ndarray = field(repr=False)
    weight: float
    axis: np.ndarray | None = field(default=None, repr=False)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.weight)

    @classmethod
    def from_values(cls, values, weight: float, axis: np.ndarray | None = None) -> "Density":
        """Renormalize nonnegative ``values`` to unit mass under ``weight``."""
        values = np.array(values, dtype=float)
        mass = np.sum(values) * weight
        if not np.isfinite(mass) or mass <= 0:
            raise ValueError("density has no finite positive mass")
        return cls(_frozen(values / mass), float(weight), axis)


def density(amps, weight: float, axis: np.ndarray | None = None) -> Density:
    """Squared modulus renormalized to unit mass under ``weight``."""
    return Density.from_values(np.abs(np.asarray(amps)) ** 2, weight, axis)


def moments(rho: Density) -> tuple[float, float]:
    """Mean and standard deviation of a 1D density along its axis."""
    if rho.axis is None:
        raise ValueError("density carries no axis")
    p = rho.values * rho.weight
    mean = float(np.sum(rho.axis * p))
    var = float(np.sum((rho.axis - mean) ** 2 * p))
    return mean, float(np.sqrt(max(var, 0.0)))


def domain_margin(w: WaveFunction, nsigma: float = 5.0) -> float:
    """Distance left between ``mean +- nsigma * std`` and the box edge."""
    mean, std = moments(w.position_density())
    return w.grid.length / 2 - (abs(mean) + nsigma * std)


def check_in_domain(w: WaveFunction, nsigma: float = 5.0, strict: bool = False,
                    t: float | None = None) -> bool:
    """Warn (or raise, if ``strict``) when a packet approaches the periodic edge."""
    margin = domain_margin(w, nsigma)
    if margin >= 0:
        return True
    where = "" if t is None else f" at t={t:g}"
    msg = (f"packet within {nsigma:g} standard deviations of the periodic boundary{where} "
           f"(short by {-margin:.3g}); enlarge the grid length")
    if strict:
        raise DomainGuardError(msg, t)
    warnings.warn(msg, DomainWarning, stacklevel=2)
    return False
