"""Exact finite-level transition dynamics.

A system starts in unperturbed eigenstate 0 and evolves under the real
symmetric ``H' / hbar``. Frequencies are in inverse-time units throughout;
state indices are zero-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jacobi import jacobi_eigh
from .numerics import Density, Grid, WaveFunction, inner_product

__all__ = [
    "TwoLevelSystem",
    "TwoLevelSpectrum",
    "MultiLevelSystem",
    "two_level_spectrum",
    "transition_coefficients",
    "transition_probability",
    "fermi_approximation",
    "multistate_coefficients",
    "multistate_probability",
    "oscillation_fields",
    "transition_densities",
    "oscillation_period",
    "harmonic_basis",
    "superpose",
]


@dataclass(frozen=True)
class TwoLevelSystem:
    omega1: float
    omega2: float
    w11: float = 0.0
    w12: float = 0.0
    w22: float = 0.0

    def __post_init__(self):
        vals = (self.omega1, self.omega2, self.w11, self.w12, self.w22)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("two-level parameters must be finite")

    @property
    def omega1_total(self) -> float:
        return self.omega1 + self.w11

    @property
    def omega2_total(self) -> float:
        return self.omega2 + self.w22

    def matrix(self) -> np.ndarray:
        return np.array([[self.omega1_total, self.w12], [self.w12, self.omega2_total]])


@dataclass(frozen=True)
class TwoLevelSpectrum:
    eta: float
    lambda_plus: float
    lambda_minus: float
    theta: float


def two_level_spectrum(sys: TwoLevelSystem) -> TwoLevelSpectrum:
    """Gap, eigenfrequencies and mixing angle of the 2x2 ``H'``.

    ``theta`` solves ``sin 2theta = 2 w12 / eta`` and
    ``cos 2theta = (w1_tot - w2_tot) / eta`` together. It lies in
    ``[0, pi/2]`` for ``w12 >= 0`` and in ``(-pi/2, 0)`` for ``w12 < 0``,
    which keeps the sign of the off-diagonal amplitude right. With
    ``eta == 0`` the matrix is already diagonal and ``theta = 0``.
    """
    d = sys.omega1_total - sys.omega2_total
    eta = float(np.hypot(d, 2.0 * sys.w12))
    mean = 0.5 * (sys.omega1_total + sys.omega2_total)
    theta = 0.0 if eta == 0.0 else 0.5 * float(np.arctan2(2.0 * sys.w12, d))
    return TwoLevelSpectrum(eta, mean + 0.5 * eta, mean - 0.5 * eta, theta)


def transition_coefficients(sys: TwoLevelSystem, t):
    """Amplitudes ``(alpha1, alpha2)`` of the two eigenstates at time ``t``."""
    sp = two_level_spectrum(sys)
    t = np.asarray(t, dtype=float)
    ep = np.exp(-1j * sp.lambda_plus * t)
    em = np.exp(-1j * sp.lambda_minus * t)
    c2, s2 = np.cos(sp.theta) ** 2, np.sin(sp.theta) ** 2
    alpha1 = c2 * ep + s2 * em
    alpha2 = np.sin(2.0 * sp.theta) * (ep - em) / 2.0
    return alpha1, alpha2


def transition_probability(sys: TwoLevelSystem, t):
    """``|alpha2(t)|^2 = 4 w12^2 / eta^2 * sin^2(eta t / 2)``."""
    sp = two_level_spectrum(sys)
    t = np.asarray(t, dtype=float)
    if sp.eta == 0.0:
        return np.zeros_like(t)
    return 4.0 * sys.w12**2 / sp.eta**2 * np.sin(0.5 * sp.eta * t) ** 2


def fermi_approximation(sys: TwoLevelSystem, t):
    """Weak-coupling, off-resonance limit of :func:`transition_probability`."""
    gap = sys.omega1 - sys.omega2
    if gap == 0.0:
        raise ValueError("golden-rule approximation is singular at resonance (omega1 == omega2)")
    t = np.asarray(t, dtype=float)
    return 4.0 * sys.w12**2 / gap**2 * np.sin(0.5 * (sys.omega2 - sys.omega1) * t) ** 2


def oscillation_period(sys: TwoLevelSystem) -> float:
    """``pi / |lambda+ - lambda-|``.

    The densities carry ``sin((lambda+ - lambda-) t)``, so they only repeat
    after twice this value.
    """
    sp = two_level_spectrum(sys)
    if sp.eta == 0.0:
        raise ValueError("degenerate system (eta == 0) does not oscillate")
    return np.pi / sp.eta


@dataclass(frozen=True, eq=False)
class MultiLevelSystem:
    """N-level ``H' / hbar`` with its eigendecomposition cached at construction."""

    hmat: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = np.array(self.hmat, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
            raise ValueError(f"hmat must be N x N with N >= 2, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("hmat must be finite")
        if not np.array_equal(h, h.T):
            raise ValueError("hmat must be exactly symmetric")
        lam, vec = jacobi_eigh(h)
        for name, a in (("hmat", h), ("eigenvalues", lam), ("eigenvectors", vec)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_two_level(cls, sys: TwoLevelSystem) -> "MultiLevelSystem":
        return cls(sys.matrix())

    @property
    def dim(self) -> int:
        return self.hmat.shape[0]

    def _check_index(self, j: int):
        if not 0 <= j < self.dim:
            raise IndexError(f"state index {j} out of range for N={self.dim}")

    def evolve(self, coeffs, t):
        """Coefficient vector after time ``t`` (any initial vector)."""
        v, lam = self.eigenvectors, self.eigenvalues
        return v @ (np.exp(-1j * lam * t) * (v.T @ np.asarray(coeffs, dtype=complex)))


def multistate_coefficients(sys: MultiLevelSystem, j: int, t):
    """``alpha_j(t) = sum_i exp(-i lambda_i t) v_ij v_i0``.

    ``v_ij`` is component ``j`` of eigenvector ``i``.
    """
    sys._check_index(j)
    v, lam = sys.eigenvectors, sys.eigenvalues
    t = np.asarray(t, dtype=float)
    weights = v[j, :] * v[0, :]
    return np.tensordot(np.exp(-1j * np.multiply.outer(t, lam)), weights, axes=([-1], [0]))


def multistate_probability(sys: MultiLevelSystem, j: int, t):
    """``|alpha_j(t)|^2`` from the double sum of cosines of eigenfrequency gaps."""
    sys._check_index(j)
    v, lam = sys.eigenvectors, sys.eigenvalues
    t = np.asarray(t, dtype=float)
    a = v[j, :] * v[0, :]
    total = np.full(t.shape, np.sum(a * a))
    n = sys.dim
    for i in range(n):
        for k in range(i + 1, n):
            total = total + 2.0 * a[i] * a[k] * np.cos((lam[i] - lam[k]) * t)
    return total


def oscillation_fields(sys: TwoLevelSystem, f1: np.ndarray, f2: np.ndarray):
    """Time-independent fields of ``|alpha1 f1 + alpha2 f2|^2``.

    Returns ``(c1, c2, c3)`` with the density equal to
    ``c1 + c2 sin^2(eta t / 2) + c3 sin(eta t)``::

        c1 = |f1|^2
        c2 = sin^2 2theta (|f2|^2 - |f1|^2) + sin 4theta Re(f1* f2)
        c3 = sin 2theta Im(f1* f2)

    Works for position amplitudes or momentum amplitudes alike.
    """
    th = two_level_spectrum(sys).theta
    p1, p2 = np.abs(f1) ** 2, np.abs(f2) ** 2
    cross = np.conj(f1) * f2
    c1 = p1
    c2 = np.sin(2 * th) ** 2 * (p2 - p1) + np.sin(4 * th) * cross.real
    c3 = np.sin(2 * th) * cross.imag
    return c1, c2, c3


def transition_densities(sys: TwoLevelSystem, basis, t: float) -> tuple[Density, Density]:
    """Position and momentum densities of the evolving two-level superposition."""
    psi1, psi2 = basis
    if psi1.grid != psi2.grid:
        raise ValueError("basis functions live on different grids")
    if abs(inner_product(psi1, psi2)) > 1e-8:
        raise ValueError("basis functions are not orthogonal")
    for w in (psi1, psi2):
        if abs(w.norm() - 1.0) > 1e-8:
            raise ValueError("basis functions must be normalized")
    eta = two_level_spectrum(sys).eta
    s2, s1 = np.sin(0.5 * eta * t) ** 2, np.sin(eta * t)
    out = []
    for f1, f2, weight, axis in (
        (psi1.amp_x, psi2.amp_x, psi1.grid.dx, psi1.grid.positions),
        (psi1.amp_k, psi2.amp_k, psi1.grid.dk, psi1.grid.momenta),
    ):
        c1, c2, c3 = oscillation_fields(sys, f1, f2)
        values = c1 + c2 * s2 + c3 * s1
        if values.min() < -1e-12 * max(values.max(), 1.0):
            raise ArithmeticError("assembled density is negative beyond rounding")
        out.append(Density.from_values(np.clip(values, 0.0, None), weight, axis))
    return out[0], out[1]


def harmonic_basis(grid: Grid, n_states: int = 2, width: float = 1.0) -> list[WaveFunction]:
    """Gaussian times Hermite polynomials, orthonormalized on the lattice."""
    if n_states < 1:
        raise ValueError("n_states must be positive")
    u = grid.positions / width
    cols = np.empty((grid.n, n_states))
    h_prev, h = np.zeros_like(u), np.ones_like(u)
    for m in range(n_states):
        cols[:, m] = h * np.exp(-0.5 * u * u)
        h_prev, h = h, 2.0 * u * h - 2.0 * m * h_prev
    q, r = np.linalg.qr(cols * np.sqrt(grid.dx))
    q = q * np.sign(np.diag(r))
    return [WaveFunction.from_position(grid, q[:, m] / np.sqrt(grid.dx)) for m in range(n_states)]


def superpose(coeffs, basis) -> WaveFunction:
    """``sum_j c_j psi_j`` without renormalizing."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) != len(basis):
        raise ValueError(f"{len(coeffs)} coefficients for {len(basis)} basis functions")
    grid = basis[0].grid
    amp = sum(c * b.amp_x for c, b in zip(coeffs, basis))
    return WaveFunction.from_position(grid, amp, normalize=False)
