"""Differential entropies of lattice densities, in nats."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import Density, WaveFunction

__all__ = [
    "EntropyValue",
    "differential_entropy",
    "phase_space_entropy",
    "gaussian_entropy_closed_form",
    "joint_entropy_2d",
]

# below this a density value counts as an exact zero (0 ln 0 = 0)
DENSITY_FLOOR = 1e-300


@dataclass(frozen=True)
class EntropyValue:
    s_r: float
    s_k: float

    @property
    def total(self) -> float:
        return self.s_r + self.s_k


def _entropy_sum(values: np.ndarray, weight: float) -> float:
    values = np.asarray(values, dtype=float)
    if np.isnan(values).any():
        raise ValueError("density contains NaN")
    p = values[values > DENSITY_FLOOR]
    return float(-np.sum(p * np.log(p)) * weight)


def differential_entropy(rho: Density | np.ndarray, weight: float | None = None) -> float:
    """Rectangle-rule ``-sum rho ln rho * weight``.

    ``rho`` is either a :class:`Density` or a bare array, in which case
    ``weight`` (the cell size) is required.
    """
    if isinstance(rho, Density):
        return _entropy_sum(rho.values, rho.weight)
    if weight is None:
        raise TypeError("weight is required for a bare array")
    return _entropy_sum(rho, weight)


def phase_space_entropy(w: WaveFunction) -> EntropyValue:
    """Position entropy plus momentum entropy of a single-particle state."""
    return EntropyValue(
        differential_entropy(w.position_density()),
        differential_entropy(w.momentum_density()),
    )


def joint_entropy_2d(rho2, weight: float | None = None) -> float:
    """Entropy of a two-particle density sampled on an ``n x n`` lattice.

    ``weight`` is the area element ``dx1 dx2`` (or ``dk1 dk2``); objects with
    ``values`` and ``weight`` attributes are accepted directly.
    """
    if hasattr(rho2, "values") and hasattr(rho2, "weight"):
        values, weight = rho2.values, rho2.weight
    else:
        values = rho2
        if weight is None:
            raise TypeError("weight is required for a bare array")
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError(f"expected a 2D density, got shape {values.shape}")
    return _entropy_sum(values.ravel(), weight)


def _as_spd(name: str, a) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0):
        raise ValueError(f"{name} must be symmetric")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be positive definite") from None
    return chol


def gaussian_entropy_closed_form(sigma2, hess, t: float) -> float:
    """Entropy of a coherent packet after quadratic-dispersion spreading.

    ``d (1 + ln pi) + 1/2 ln det(I + t^2 (Sigma^-1 H)^2)``, with ``d`` the
    dimension of ``sigma2``. The determinant is taken through the eigenvalues
    of ``L^-1 H L^-T`` (``Sigma = L L^T``), which share their spectrum with
    ``Sigma^-1 H`` and stay finite for large ``t``.
    """
    chol = _as_spd("sigma2", sigma2)
    h = np.atleast_2d(np.asarray(hess, dtype=float))
    if h.shape != chol.shape:
        raise ValueError(f"hess shape {h.shape} does not match sigma2 shape {chol.shape}")
    _as_spd("hess", h)
    d = chol.shape[0]
    linv = np.linalg.inv(chol)
    x = np.abs(t * np.linalg.eigvalsh(linv @ h @ linv.T))
    # 1/2 ln(1 + x^2), rewritten for x > 1 so that x^2 never overflows
    hi, lo = np.maximum(x, 1.0), np.minimum(x, 1.0)
    half_logs = np.where(x > 1.0, np.log(hi) + 0.5 * np.log1p(hi**-2), 0.5 * np.log1p(lo**2))
    return float(d * (1.0 + np.log(np.pi)) + np.sum(half_logs))
