"""Measurement statistics of truncated Fock-space states."""

from __future__ import annotations

import math

import numpy as np

from .. import quadrature
from ..dense_coding import ChannelMatrix, SignalAlphabet
from ..config import ExperimentConfig, Scheme
from .experiments import conditional_state
from .operations import annihilation, beam_splitter, quadrature_operator, quadrature_square
from .states import DensityOperator

__all__ = [
    "hermite_functions",
    "quadrature_pdf",
    "bell_pdf",
    "wigner",
    "mean_photon",
    "quadrature_variance",
    "bell_variance",
    "number_operator",
    "overlap_matrix",
    "quadrant_probabilities",
    "channel_matrix_oracle",
]

DOMAIN = 12.0


def hermite_functions(n_max: int, x) -> np.ndarray:
    """``psi_n(x)`` for ``n = 0..n_max`` via the normalized three-term recurrence.

    Returns:
        Array of shape ``(n_max + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def _phased(n_max: int, x, quad_phase: float) -> np.ndarray:
    # <n|x_phi> = psi_n(x) e^{i n phi}
    phase = np.exp(1j * quad_phase * np.arange(n_max + 1))
    psi = hermite_functions(n_max, x)
    return psi * phase.reshape((-1,) + (1,) * (psi.ndim - 1))


def quadrature_pdf(rho: DensityOperator, mode: int, quad_phase: float, x) -> np.ndarray:
    """``<x_phi| rho_mode |x_phi>`` on the reduced state of ``mode``."""
    r = rho.reduced(mode).tensor
    x = np.asarray(x, dtype=float)
    chi = _phased(r.shape[0] - 1, x.ravel(), quad_phase)
    vals = np.einsum("ak,ab,bk->k", chi.conj(), r, chi).real
    return vals.reshape(x.shape)


def _bell_ports(rho: DensityOperator) -> np.ndarray:
    if rho.mode_count != 2:
        raise ValueError("Bell statistics need a two-mode state")
    # the port operators after V(-pi/4) are (a - b)/sqrt 2 and (a + b)/sqrt 2
    return np.asarray(beam_splitter(rho, 0, 1, -math.pi / 4).tensor)


def bell_pdf(rho: DensityOperator, x, p) -> np.ndarray:
    """Joint density of ``x_A - x_B`` and ``p_A + p_B``.

    Realized by recombining on a 50:50 splitter, measuring ``x`` on one port
    and ``p`` on the other; the port outcomes are the Bell variables divided
    by ``sqrt(2)``.

    Args:
        rho: Two-mode state.
        x: Values of ``x_A - x_B`` (1-D grid).
        p: Values of ``p_A + p_B`` (1-D grid).

    Returns:
        Array of shape ``(len(x), len(p))``.
    """
    t = _bell_ports(rho)
    d = t.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    s = math.sqrt(2.0)
    psi = hermite_functions(d - 1, x / s)
    chi = _phased(d - 1, p / s, math.pi / 2)
    reduced_x = np.einsum("ak,abcd,ck->kbd", psi, t, psi)
    vals = np.einsum("bl,kbd,dl->kl", chi.conj(), reduced_x, chi).real
    return vals / 2.0


def wigner(rho: DensityOperator, x, p, tol: float = 1e-10) -> np.ndarray:
    """``W(x, p) = (1/pi) int dy e^{-2ipy} <x - y| rho |x + y>`` on a grid.

    The ``y`` integral runs over ``[-12, 12]`` with Gauss-Legendre panels
    refined until successive values change by less than ``tol``.

    Returns:
        Array of shape ``(len(x), len(p))``.
    """
    if rho.mode_count != 1:
        raise ValueError("Wigner function needs a single-mode state")
    r = np.asarray(rho.tensor)
    d = r.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))

    def estimate(panels: int) -> np.ndarray:
        y, w = quadrature.gl_panels(-DOMAIN, DOMAIN, panels)
        lo = hermite_functions(d - 1, x[:, None] - y[None, :])
        hi = hermite_functions(d - 1, x[:, None] + y[None, :])
        kernel = np.einsum("mky,mn,nky->ky", lo, r, hi)
        phase = np.exp(-2j * p[:, None] * y[None, :])
        return np.einsum("ky,ly,y->kl", kernel, phase, w).real / math.pi

    value, _ = quadrature.refine(estimate, tol=tol, start=16)
    return value


def mean_photon(rho: DensityOperator, mode: int = 0) -> float:
    r = rho.reduced(mode).tensor
    return float(np.sum(np.arange(r.shape[0]) * np.diag(r).real))


def quadrature_variance(rho: DensityOperator, mode: int = 0, quad_phase: float = 0.0) -> float:
    """``<x_phi^2> - <x_phi>^2`` from operator moments."""
    d = rho.dims[mode]
    m1 = rho.expectation(quadrature_operator(d, quad_phase), mode).real
    m2 = rho.expectation(quadrature_square(d, quad_phase), mode).real
    return m2 - m1 * m1


def bell_variance(rho: DensityOperator) -> float:
    """Variance of ``x_A - x_B`` from operator moments."""
    if rho.mode_count != 2:
        raise ValueError("Bell statistics need a two-mode state")
    d = rho.dims[0]
    x = quadrature_operator(d)
    x2 = quadrature_square(d)
    eye = np.eye(d)
    m = rho.matrix
    diff = np.kron(x, eye) - np.kron(eye, x)
    sq = np.kron(x2, eye) + np.kron(eye, x2) - 2.0 * np.kron(x, x)
    mean = np.sum(m * diff.T).real
    return float(np.sum(m * sq.T).real - mean * mean)


def overlap_matrix(n_max: int, lo: float, hi: float, quad_phase: float = 0.0, tol: float = 1e-12) -> np.ndarray:
    """``I[a, b] = int_lo^hi conj(<a|x_phi>) <b|x_phi> dx`` by refined Gauss-Legendre panels."""
    lo, hi = max(lo, -DOMAIN), min(hi, DOMAIN)
    if not hi > lo:
        return np.zeros((n_max + 1, n_max + 1), dtype=complex)

    def estimate(panels: int) -> np.ndarray:
        u, w = quadrature.gl_panels(lo, hi, panels)
        chi = _phased(n_max, u, quad_phase)
        return (chi.conj() * w) @ chi.T

    value, _ = quadrature.refine(estimate, tol=tol, start=4)
    return value


def quadrant_probabilities(rho: DensityOperator, x_shift: float, p_shift: float) -> np.ndarray:
    """Probabilities of the four sign quadrants of the Bell variables after a shift.

    The shift ``(x_shift, p_shift)`` translates the Bell distribution, which
    is what a displacement of one mode by the same amount does.

    Returns:
        Length-4 array indexed ``2*m + n`` with ``m = 0`` for ``x >= 0`` and ``n = 0`` for ``p >= 0``.
    """
    t = _bell_ports(rho)
    d = t.shape[0]
    s = math.sqrt(2.0)
    ux = -x_shift / s
    up = -p_shift / s
    ix = (overlap_matrix(d - 1, ux, DOMAIN), overlap_matrix(d - 1, -DOMAIN, ux))
    ip = (
        overlap_matrix(d - 1, up, DOMAIN, math.pi / 2),
        overlap_matrix(d - 1, -DOMAIN, up, math.pi / 2),
    )
    out = np.empty(4)
    for m in (0, 1):
        for n in (0, 1):
            # Tr[rho' (Pi_x (x) Pi_p)], Pi[c, a] = I[a, c]
            out[2 * m + n] = np.einsum("abcd,ac,bd->", t, ix[m], ip[n]).real
    return out


def channel_matrix_oracle(config: ExperimentConfig, alphabet: SignalAlphabet, cutoff) -> ChannelMatrix:
    """Dense-coding channel matrix from quadrant integrals of the Fock-space Bell statistics.

    Args:
        config: Two-mode experiment.
        alphabet: QPSK symbols.
        cutoff: Photon-number bound for :func:`conditional_state`.

    Returns:
        The 4x4 channel matrix, validated for row sums within 1e-9.
    """
    if config.scheme is not Scheme.TWO:
        raise ValueError("dense coding uses the two-mode scheme")
    rho, _ = conditional_state(config, cutoff)
    rows = [quadrant_probabilities(rho, xs, ps) for xs, ps in alphabet.symbols]
    return ChannelMatrix(np.clip(np.array(rows), 0.0, 1.0))


def number_operator(dim: int) -> np.ndarray:
    a = annihilation(dim)
    return a.conj().T @ a
