"""Quadrature-phase-shift-keyed dense coding over the two-mode heralded state.

Alice displaces her mode by one of four symbols; Bob performs a Bell
measurement and decides by the signs of ``(x_A - x_B, p_A + p_B)``. The
channel matrix follows from integrating the signed Gaussian mixture of the
Bell outcomes over the four sign quadrants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from . import gaussian_core as gc
from .config import ExperimentConfig, Scheme
from .errors import DegenerateConditioning, InvalidDistribution
from .sweeps import SweepResult, find_crossover

__all__ = [
    "erf",
    "SignalAlphabet",
    "OmegaTable",
    "ChannelMatrix",
    "omega_table",
    "channel_matrix",
    "reference_channel_matrix",
    "mutual_information",
    "mi_scan",
    "mi_crossover",
]

_NORM_TOL = 1e-9


def erf(x):
    """Error function ``(2/sqrt(pi)) * integral_0^x exp(-t^2) dt``.

    Args:
        x: Finite real scalar or array.

    Returns:
        ``erf(x)`` with the same shape as ``x``.
    """
    out = special.erf(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SignalAlphabet:
    """Four QPSK symbols ``a_kl`` at ``((-1)^k, (-1)^l) * sqrt(2) * alpha``.

    Symbols and decisions are both indexed ``2*k + l``; decision ``b_mn`` with
    ``m = 0`` means ``x >= 0`` and ``n = 0`` means ``p >= 0``.
    """

    alpha: float
    priors: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError(f"alpha must be finite and non-negative, got {self.alpha!r}")
        priors = tuple(float(p) for p in self.priors)
        if len(priors) != 4:
            raise ValueError("exactly four priors are required")
        _check_distribution(np.array(priors), "priors")
        object.__setattr__(self, "priors", priors)

    @property
    def amplitude(self) -> float:
        return math.sqrt(2.0) * self.alpha

    @property
    def symbols(self) -> tuple[tuple[float, float], ...]:
        s = self.amplitude
        return tuple(((-1) ** k * s, (-1) ** l * s) for k in (0, 1) for l in (0, 1))


@dataclass(frozen=True)
class OmegaTable:
    """Per-component argument scale: the ``(i, j)`` term contributes ``erf(alpha * omega)``."""

    values: dict

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.values[key]


@dataclass(frozen=True)
class ChannelMatrix:
    """Row-stochastic ``P(b_mn | a_kl)``; rows are sent symbols, columns decisions."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.shape != (4, 4):
            raise ValueError(f"channel matrix must be 4x4, got {e.shape}")
        if np.any(e < -_NORM_TOL) or np.any(e > 1.0 + _NORM_TOL):
            raise InvalidDistribution("channel-matrix entries must lie in [0, 1]")
        for row in e:
            _check_distribution(row, "channel-matrix row")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __getitem__(self, key):
        return self.entries[key]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


def _check_distribution(p: np.ndarray, what: str) -> None:
    if np.any(~np.isfinite(p)) or np.any(p < -_NORM_TOL):
        raise InvalidDistribution(f"{what} has negative or non-finite entries")
    if abs(math.fsum(p) - 1.0) > _NORM_TOL:
        raise InvalidDistribution(f"{what} sums to {math.fsum(p)!r}, not 1")


def _require_two_mode(config: ExperimentConfig) -> None:
    if config.scheme is not Scheme.TWO:
        raise ValueError("dense coding uses the two-mode scheme")


def omega_table(config: ExperimentConfig) -> OmegaTable:
    """``Omega'_ij = sqrt(E_ij / D_ij)`` from the effective tap reflectances."""
    _require_two_mode(config)
    lam = config.lam
    s = config.setup
    a = s.TL * s.T
    gam = gc.gamma_table(config)
    out = {}
    for i, j in gc.INDICES:
        gi, gj = gam.pair(i, j)
        num = 1.0 - lam**2 * (a + s.RL + gi) * (a + s.RL + gj)
        den = (1.0 - lam * a) ** 2 - lam**2 * (s.RL + gi) * (s.RL + gj)
        out[(i, j)] = math.sqrt(num / den)
    return OmegaTable(out)


def _class_probs(e: np.ndarray) -> np.ndarray:
    """Quadrant masses of a centered isotropic term for (diagonal, one-bit, two-bit) errors."""
    return np.stack([(1.0 + e) ** 2, (1.0 - e) * (1.0 + e), (1.0 - e) ** 2]) / 4.0


def _class_deltas(e: np.ndarray, e_ref: float) -> np.ndarray:
    # differences of _class_probs against the reference term; each set sums
    # to zero over a row (1 + 2 + 1 entries) by construction
    d = e - e_ref
    s = e + e_ref
    return np.stack([d * (2.0 + s), -d * s, d * (s - 2.0)]) / 4.0


def _assemble(classes: np.ndarray) -> np.ndarray:
    diag, one, two = classes
    out = np.empty((4, 4))
    for a in range(4):
        for b in range(4):
            flips = bin(a ^ b).count("1")
            out[a, b] = (diag, one, two)[flips]
    return out


def channel_matrix(config: ExperimentConfig, alphabet: SignalAlphabet) -> ChannelMatrix:
    """Channel matrix of dense coding with the heralded two-mode state.

    Each Gaussian term of the Bell-outcome mixture contributes
    ``erf(alpha * Omega_ij)`` per axis. The four terms carry weights
    ``(-1)^(i+j) exp(-(2-i-j) nu)`` and their masses add up to the
    detection probability. Entries are written as the quadrant masses of the
    ``(1, 1)`` term plus per-term corrections that each sum to zero along a
    row; this keeps rows stochastic at small ``lambda``, where the individual
    term weights are far larger than the result.

    Args:
        config: Two-mode experiment.
        alphabet: QPSK symbols.

    Returns:
        The 4x4 channel matrix.

    Raises:
        DegenerateConditioning: The heralding probability vanishes.
    """
    _require_two_mode(config)
    mix = gc.homodyne_mixture(config)
    terms = mix.components
    scale = np.array([math.sqrt(2.0 * t.coeff_x) for t in terms])
    e = special.erf(alphabet.alpha * scale)
    coef = np.array([t.weight * t.mass for t in terms]) / mix.normalization
    ref = [k for k, t in enumerate(terms) if t.index == (1, 1)][0]
    classes = _class_probs(np.array([e[ref]]))[:, 0].copy()
    deltas = _class_deltas(e, e[ref])
    for k in range(len(terms)):
        if k != ref:
            classes += coef[k] * deltas[:, k]
    entries = np.clip(_assemble(classes), 0.0, 1.0)
    return ChannelMatrix(entries)


def reference_channel_matrix(
    lam: float, alphabet: SignalAlphabet, apply_loss: bool = False, TL: float = 1.0
) -> ChannelMatrix:
    """Channel matrix with the un-subtracted two-mode squeezed vacuum."""
    v = gc.reference_variance(lam, Scheme.TWO, apply_loss, TL)
    e = special.erf(alphabet.amplitude / math.sqrt(2.0 * v))
    return ChannelMatrix(_assemble(_class_probs(np.array([e]))[:, 0]))


def mutual_information(matrix: ChannelMatrix | np.ndarray, priors: Sequence[float] | None = None) -> float:
    """Mutual information in bits between sent symbol and decision.

    Args:
        matrix: Row-stochastic 4x4 matrix.
        priors: Symbol probabilities; uniform when omitted.

    Returns:
        ``I(A;B)`` in bits, with ``0 log 0 = 0``.

    Raises:
        InvalidDistribution: Rows or priors are not normalized within 1e-9.
    """
    m = matrix.entries if isinstance(matrix, ChannelMatrix) else np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDistribution("channel matrix must be square")
    p = np.full(m.shape[0], 1.0 / m.shape[0]) if priors is None else np.asarray(priors, dtype=float)
    _check_distribution(p, "priors")
    for row in m:
        _check_distribution(row, "channel-matrix row")
    joint = p[:, None] * m
    out_marg = joint.sum(axis=0)
    mask = joint > 0
    ratio = m[mask] / np.broadcast_to(out_marg, m.shape)[mask]
    info = float(np.sum(joint[mask] * np.log2(ratio)))
    return min(max(info, 0.0), math.log2(m.shape[0]))


def _mi_pair(config: ExperimentConfig, alphabet: SignalAlphabet) -> tuple[float, float]:
    ng = mutual_information(channel_matrix(config, alphabet), alphabet.priors)
    ref = reference_channel_matrix(config.lam, alphabet, apply_loss=True, TL=config.setup.TL)
    return ng, mutual_information(ref, alphabet.priors)


def mi_scan(config: ExperimentConfig, grid: Iterable[float], alphabet: SignalAlphabet) -> SweepResult:
    """Mutual information of the heralded and reference states over ``lambda``.

    The reference state suffers the same path transmittance as the heralded
    one, which reduces to the lossless reference for ideal setups.

    Args:
        config: Template; its ``lambda`` is replaced by each grid value.
        grid: Strictly increasing values in ``[0, 1)``.
        alphabet: QPSK symbols.

    Returns:
        Columns ``value_ng`` and ``value_ref`` in bits; ``value_ng`` is NaN
        where no heralded state exists.
    """
    _require_two_mode(config)
    grid = np.asarray(list(grid), dtype=float)
    if np.any(grid < 0.0) or np.any(grid >= 1.0):
        raise ValueError("lambda grid must lie in [0, 1)")
    ng, ref = [], []
    for lam in grid:
        cfg = config.with_lambda(float(lam))
        try:
            a, b = _mi_pair(cfg, alphabet)
        except DegenerateConditioning:
            a = math.nan
            b = mutual_information(reference_channel_matrix(cfg.lam, alphabet, True, cfg.setup.TL), alphabet.priors)
        ng.append(a)
        ref.append(b)
    meta = {"quantity": "mutual_information", "alpha": alphabet.alpha, **config.as_dict()}
    meta.pop("lambda", None)
    return SweepResult("lambda", grid, {"value_ng": ng, "value_ref": ref}, meta)


def mi_crossover(
    config: ExperimentConfig, alphabet: SignalAlphabet, lo: float = 0.1, hi: float = 0.95
) -> float | None:
    """Largest ``lambda`` in ``[lo, hi]`` where the heralded state stops beating the reference.

    The heralded state has the larger mutual information below the
    returned value. Located by a scan at 1e-3 and Brent refinement to 1e-6.
    """

    def gap(lam: float) -> float:
        a, b = _mi_pair(config.with_lambda(lam), alphabet)
        return b - a

    return find_crossover(gap, lo, hi, rising=True)
