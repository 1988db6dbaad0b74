"""Beam splitters, loss, on-off detection and displacement in a truncated Fock basis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from ..config import DetectorModel
from ..errors import CutoffTooSmall
from .states import DensityOperator, FockStateVector

__all__ = [
    "DiagonalPOVM",
    "on_off_povm",
    "sector_unitary",
    "beam_splitter",
    "loss_channel",
    "tap_coefficients",
    "detect_on",
    "displace",
    "annihilation",
    "quadrature_operator",
    "quadrature_square",
]

# amplitudes on incomplete photon-number sectors larger than this mean the box is too small
_LEAK = 1e-12


@lru_cache(maxsize=4096)
def sector_unitary(total: int, theta: float) -> np.ndarray:
    """``exp[theta (a^dagger b - a b^dagger)]`` on the block of ``total`` photons.

    Rows and columns are indexed by the photon number in mode ``a``; the basis
    vector ``n`` is ``|n, total - n>``.
    """
    n = np.arange(total)
    gen = np.zeros((total + 1, total + 1))
    # a^dagger b |n, N-n> = sqrt((n+1)(N-n)) |n+1, N-n-1>
    amp = np.sqrt((n + 1.0) * (total - n))
    gen[n + 1, n] = amp
    gen[n, n + 1] = -amp
    u = expm(theta * gen)
    u.setflags(write=False)
    return u


def _apply_pair(arr: np.ndarray, ax_a: int, ax_b: int, theta: float) -> np.ndarray:
    arr = np.moveaxis(arr, (ax_a, ax_b), (0, 1))
    d = arr.shape[0]
    if arr.shape[1] != d:
        raise ValueError("beam-splitter modes need equal truncation")
    out = np.zeros_like(arr)
    for total in range(2 * d - 1):
        n = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
        block = arr[n, total - n]
        if total < d:
            out[n, total - n] = np.tensordot(sector_unitary(total, float(theta)), block, axes=1)
        elif np.max(np.abs(block), initial=0.0) > _LEAK:
            raise CutoffTooSmall(
                f"support on {total} photons exceeds the per-mode box of {d - 1}; enlarge the cutoff"
            )
    return np.moveaxis(out, (0, 1), (ax_a, ax_b))


def beam_splitter(target, mode_a: int, mode_b: int, theta: float):
    """Apply ``V(theta) = exp[theta (a^dagger b - a b^dagger)]`` to two modes.

    Heisenberg action: ``V^dagger a V = a cos(theta) + b sin(theta)``.
    Works blockwise on fixed total photon number, so it is exactly unitary
    for states supported on totals within the box.

    Args:
        target: :class:`FockStateVector` or :class:`DensityOperator`.
        mode_a: First mode (the ``a`` operator).
        mode_b: Second mode.
        theta: Mixing angle; ``cos(theta)^2`` is the transmittance.

    Returns:
        Object of the same type as ``target``.

    Raises:
        CutoffTooSmall: The state has support on totals the box cannot hold.
    """
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    if isinstance(target, DensityOperator):
        k = target.mode_count
        _check_modes(k, mode_a, mode_b)
        t = _apply_pair(np.asarray(target.tensor), mode_a, mode_b, theta)
        # the block unitaries are real, so the bra side uses the same matrices
        t = _apply_pair(t, k + mode_a, k + mode_b, theta)
        return DensityOperator(t)
    psi = np.asarray(target.amplitudes if isinstance(target, FockStateVector) else target)
    _check_modes(psi.ndim, mode_a, mode_b)
    return FockStateVector(_apply_pair(psi, mode_a, mode_b, theta))


def _check_modes(k: int, *modes: int) -> None:
    for m in modes:
        if not 0 <= m < k:
            raise ValueError(f"mode {m} out of range for {k} modes")


def _shift_sum(rho: DensityOperator, mode: int, coeffs: list[np.ndarray], weights) -> DensityOperator:
    """``sum_l w_l K_l rho K_l^dagger`` with ``K_l |n> = coeffs[l][n] |n - l>``."""
    k = rho.mode_count
    t = np.moveaxis(np.asarray(rho.tensor), (mode, k + mode), (0, 1))
    d = t.shape[0]
    out = np.zeros_like(t)
    extra = (None,) * (t.ndim - 2)
    for l, (c, w) in enumerate(zip(coeffs, weights)):
        if w == 0.0 or l >= d:
            continue
        cl = c[l:]
        scale = w * (cl[:, None] * cl[None, :].conj())
        out[: d - l, : d - l] += scale[(...,) + extra] * t[l:, l:]
    return DensityOperator(np.moveaxis(out, (0, 1), (mode, k + mode)))


def loss_channel(rho: DensityOperator, mode: int, transmittance: float) -> DensityOperator:
    """Photon loss with operator-sum elements ``sqrt(C(n,l) T^(n-l) (1-T)^l) |n-l><n|``."""
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    if transmittance == 1.0:
        return rho
    d = rho.dims[mode]
    n = np.arange(d)
    coeffs = []
    for l in range(d):
        c = np.zeros(d)
        m = n[l:]
        if transmittance == 0.0:
            c[l] = 1.0
        else:
            log_c = gammaln(m + 1) - gammaln(l + 1) - gammaln(m - l + 1)
            c[l:] = np.exp(0.5 * (log_c + (m - l) * math.log(transmittance)))
            c[l:] *= (1.0 - transmittance) ** (0.5 * l)
        coeffs.append(c)
    return _shift_sum(rho, mode, coeffs, np.ones(d))


def tap_coefficients(theta: float, dim: int) -> list[np.ndarray]:
    """``M_c = <c|_tap V(theta) |0>_tap`` as shifted diagonals: ``M_c |n> = coeffs[c][n] |n - c>``.

    Read directly off the photon-number blocks of the beam splitter.
    """
    coeffs = [np.zeros(dim) for _ in range(dim)]
    for n in range(dim):
        u = sector_unitary(n, float(theta))
        # |n, 0> is column n of block n; |n - c, c> is row n - c
        for c in range(n + 1):
            coeffs[c][n] = u[n - c, n]
    return coeffs


@dataclass(frozen=True, eq=False)
class DiagonalPOVM:
    """POVM element diagonal in photon number."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError("POVM weights must lie in [0, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __getitem__(self, n):
        return self.weights[n]

    def __len__(self):
        return len(self.weights)

    def matrix(self) -> np.ndarray:
        return np.diag(self.weights)


def on_off_povm(detector: DetectorModel, dim: int) -> tuple[DiagonalPOVM, DiagonalPOVM]:
    """``(off, on)`` with ``off_n = exp(-nu) (1 - eta)^n`` and ``on = 1 - off``."""
    n = np.arange(dim)
    off = math.exp(-detector.dark_mean) * (1.0 - detector.efficiency) ** n
    return DiagonalPOVM(off), DiagonalPOVM(1.0 - off)


def detect_on(rho: DensityOperator, mode: int, theta: float, detector: DetectorModel) -> DensityOperator:
    """Tap ``mode`` with ``V(theta)`` onto a vacuum ancilla and keep the detector's "on" outcome.

    Returns the unnormalized post-selected state of the remaining modes,
    ``sum_c on_c M_c rho M_c^dagger``.
    """
    d = rho.dims[mode]
    _, on = on_off_povm(detector, d)
    return _shift_sum(rho, mode, tap_coefficients(theta, d), on.weights)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def quadrature_operator(dim: int, quad_phase: float = 0.0) -> np.ndarray:
    """``x_phi = (a e^{-i phi} + a^dagger e^{i phi}) / sqrt(2)``."""
    a = annihilation(dim) * np.exp(-1j * quad_phase)
    return (a + a.conj().T) / math.sqrt(2.0)


def quadrature_square(dim: int, quad_phase: float = 0.0) -> np.ndarray:
    """``x_phi^2`` built from normal-ordered elements, exact on every kept level."""
    a = annihilation(dim)
    a2 = (a @ a) * np.exp(-2j * quad_phase)
    n = np.diag(np.arange(dim, dtype=float))
    return (a2 + a2.conj().T + 2.0 * n + np.eye(dim)) / 2.0


def displace(rho: DensityOperator, mode: int, x_s: float, p_s: float, pad: int = 40) -> DensityOperator:
    """Conjugate ``mode`` by ``D(beta)``, ``beta = (x_s + i p_s)/sqrt(2)``.

    The displacement operator is exponentiated in a box ``pad`` levels larger
    and cropped back, so the quadrature means shift by exactly ``(x_s, p_s)``
    up to the truncation error.

    Raises:
        CutoffTooSmall: More than 1e-8 of the displaced state falls outside the box.
    """
    d = rho.dims[mode]
    big = d + pad
    beta = (x_s + 1j * p_s) / math.sqrt(2.0)
    a = annihilation(big)
    D = expm(beta * a.conj().T - np.conj(beta) * a)
    full = D[:, :d]
    k = rho.mode_count
    t = np.moveaxis(np.asarray(rho.tensor), (mode, k + mode), (0, 1))
    t = np.tensordot(full, t, axes=(1, 0))
    t = np.moveaxis(np.tensordot(full.conj(), t, axes=(1, 1)), 0, 1)
    moved = np.moveaxis(t, (0, 1), (mode, k + mode))
    big_rho = DensityOperator(moved)
    lost = rho.trace() - _kept_trace(big_rho, mode, d)
    if lost > 1e-8:
        raise CutoffTooSmall(f"displacement pushes {lost:.3e} of the state past the cutoff")
    idx = [slice(None)] * (2 * k)
    idx[mode] = idx[k + mode] = slice(0, d)
    return DensityOperator(moved[tuple(idx)])


def _kept_trace(rho: DensityOperator, mode: int, d: int) -> float:
    r = rho.reduced(mode).tensor
    return float(np.trace(r[:d, :d]).real)
