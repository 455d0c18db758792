"""Positive-energy Dirac dispersion, coherent packets and free propagators.

All functions accept scalars or numpy arrays for ``k``. Units are natural
(``c`` defaults to 1); the single mass parameter is ``hbar_over_m``, so the
rest wavenumber is ``m c / hbar = c / hbar_over_m``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import Grid, WaveFunction, check_in_domain, moments

__all__ = [
    "AliasingError",
    "DispersionModel",
    "CoherentStateParams",
    "omega",
    "group_velocity",
    "hessian",
    "hessian_matrix",
    "hessian_eigenvalues_3d",
    "coherent_state",
    "propagate_exact",
    "propagate_taylor",
    "conjugate",
]


class AliasingError(ValueError):
    """The packet's momentum content reaches the lattice Nyquist momentum."""


@dataclass(frozen=True)
class DispersionModel:
    c: float = 1.0
    hbar_over_m: float = 1.0
    energy_branch: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not (np.isfinite(self.hbar_over_m) and self.hbar_over_m > 0):
            raise ValueError(f"hbar_over_m must be positive, got {self.hbar_over_m!r}")
        if self.energy_branch != 1:
            raise ValueError("only the positive-energy branch is supported")

    @property
    def rest_wavenumber(self) -> float:
        return self.c / self.hbar_over_m


def omega(k, model: DispersionModel):
    """``c sqrt(k^2 + (m c / hbar)^2)``."""
    k = np.asarray(k, dtype=float)
    return model.c * np.hypot(k, model.rest_wavenumber)


def group_velocity(k, model: DispersionModel):
    k = np.asarray(k, dtype=float)
    q = k / model.rest_wavenumber
    return model.hbar_over_m * k / np.sqrt(1.0 + q * q)


def hessian(k, model: DispersionModel):
    """Second derivative of ``omega`` in 1D; always positive."""
    q = np.asarray(k, dtype=float) / model.rest_wavenumber
    return model.hbar_over_m * (1.0 + q * q) ** -1.5


def hessian_matrix(kvec, model: DispersionModel) -> np.ndarray:
    """Full 3x3 Hessian of ``omega`` at the wavevector ``kvec``."""
    q = np.asarray(kvec, dtype=float) / model.rest_wavenumber
    if q.shape != (3,):
        raise ValueError(f"kvec must have shape (3,), got {q.shape}")
    q2 = q @ q
    return model.hbar_over_m * (1.0 + q2) ** -1.5 * ((1.0 + q2) * np.eye(3) - np.outer(q, q))


def hessian_eigenvalues_3d(knorm, model: DispersionModel):
    """Longitudinal and (doubly degenerate) transverse Hessian eigenvalues."""
    knorm = np.asarray(knorm, dtype=float)
    if np.any(knorm < 0):
        raise ValueError("knorm must be nonnegative")
    s = 1.0 + (knorm / model.rest_wavenumber) ** 2
    return model.hbar_over_m * s**-1.5, model.hbar_over_m * s**-0.5


@dataclass(frozen=True)
class CoherentStateParams:
    """Minimum-uncertainty packet ``N(x; r0, sigma2) exp(i k0 x)``.

    ``sigma2`` is the amplitude covariance, so the position density has
    variance ``sigma2 / 2`` and the momentum density ``1 / (2 sigma2)``.
    """

    r0: float = 0.0
    k0: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")
        if not (np.isfinite(self.r0) and np.isfinite(self.k0)):
            raise ValueError("r0 and k0 must be finite")

    def momentum_reach(self) -> float:
        return abs(self.k0) + 4.0 / np.sqrt(self.sigma2)


def coherent_state(params: CoherentStateParams, grid: Grid) -> WaveFunction:
    reach = params.momentum_reach()
    if reach >= grid.k_nyquist:
        raise AliasingError(
            f"|k0| + 4/sqrt(sigma2) = {reach:.4g} reaches the Nyquist momentum "
            f"{grid.k_nyquist:.4g}; refine the grid"
        )
    x = grid.positions
    amp = np.exp(-((x - params.r0) ** 2) / (2.0 * params.sigma2) + 1j * params.k0 * x)
    w = WaveFunction.from_position(grid, amp)
    check_in_domain(w)
    return w


def _apply_phase(w: WaveFunction, phase: np.ndarray) -> WaveFunction:
    return WaveFunction.from_momentum(w.grid, w.amp_k * np.exp(-1j * phase), normalize=True)


def propagate_exact(w: WaveFunction, t: float, model: DispersionModel) -> WaveFunction:
    """Spectral free evolution ``phi(k) -> phi(k) exp(-i omega(k) t)``."""
    if t == 0:
        return w
    return _apply_phase(w, omega(w.grid.momenta, model) * t)


def taylor_phase(k, k0: float, model: DispersionModel):
    """Quadratic expansion of ``omega`` about ``k0`` (the dispersion transform)."""
    dk = np.asarray(k, dtype=float) - k0
    return omega(k0, model) + group_velocity(k0, model) * dk + 0.5 * hessian(k0, model) * dk * dk


def propagate_taylor(w: WaveFunction, t: float, model: DispersionModel,
                     k0: float | None = None) -> WaveFunction:
    """Second-order dispersion-transform evolution about ``k0``.

    ``k0`` defaults to the mean of the momentum density. The phase at ``k0``
    is ``omega(k0) t`` since the phase velocity times ``k0`` is ``omega(k0)``.
    """
    if k0 is None:
        k0, _ = moments(w.momentum_density())
    if t == 0:
        return w
    return _apply_phase(w, taylor_phase(w.grid.momenta, k0, model) * t)


def conjugate(w: WaveFunction) -> WaveFunction:
    """Complex conjugate in position space (mirrors the momentum density)."""
    return WaveFunction.from_position(w.grid, np.conj(w.amp_x), normalize=False)
