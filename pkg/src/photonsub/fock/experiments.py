"""Brute-force heralding experiments in a truncated Fock basis."""

from __future__ import annotations

import math

import numpy as np

from ..config import DetectorModel, ExperimentConfig, Scheme
from ..errors import CutoffTooSmall, DegenerateConditioning
from .operations import beam_splitter, detect_on, loss_channel, on_off_povm
from .states import (
    TAIL_TOLERANCE,
    DensityOperator,
    FockCutoff,
    FockStateVector,
    squeezed_amplitudes,
    squeezed_vacuum_state,
)

__all__ = [
    "conditional_state",
    "dakna_conditional_state",
    "two_mode_input",
    "vacuum_overlap",
    "trace_distance",
]

_MIN_PROBABILITY = 1e-30


def _cutoff(value, lam: float, scheme: Scheme) -> FockCutoff:
    if isinstance(value, FockCutoff):
        return FockCutoff(value.n_max, lam, scheme)
    return FockCutoff(int(value), lam, scheme)


def two_mode_input(lam: float, cutoff: FockCutoff, split_angle: float = math.pi / 4) -> FockStateVector:
    """``V(pi/4) |r>_A |-r>_B`` restricted to at most ``n_max`` photons in total.

    The product state is built in a box twice as large so that every
    photon-number block it touches is complete, mixed, then cropped.
    """
    n = cutoff.n_max
    big = 2 * n + 1
    a = np.zeros(big)
    b = np.zeros(big)
    a[: n + 1] = squeezed_amplitudes(lam, n)
    b[: n + 1] = squeezed_amplitudes(-lam, n)
    psi = beam_splitter(FockStateVector(np.multiply.outer(a, b)), 0, 1, split_angle).amplitudes
    na, nb = np.indices(psi.shape)
    kept = np.where(na + nb <= n, psi, 0.0)
    lost = 1.0 - float(np.sum(np.abs(kept) ** 2))
    if lost > TAIL_TOLERANCE:
        raise CutoffTooSmall(f"two-mode truncation at {n} discards {lost:.3e}")
    return FockStateVector(kept[: n + 1, : n + 1])


def conditional_state(config: ExperimentConfig, cutoff) -> tuple[DensityOperator, float]:
    """Run the heralding network and return the normalized state with its success probability.

    Single-mode scheme: split ``|r>|0>`` on a 50:50 splitter, attenuate both
    arms, tap both arms onto on-off detectors, keep on-on events, and
    recombine. Two-mode scheme: the same with the two-mode squeezed input and
    no recombination.

    Args:
        config: Experiment parameters.
        cutoff: :class:`FockCutoff` or photon-number bound.

    Returns:
        ``(rho, probability)`` with ``rho`` over modes ``(A, B)``.

    Raises:
        CutoffTooSmall: Truncation would drop more than the tolerated tail.
        DegenerateConditioning: Success probability below 1e-30.
    """
    lam = config.lam
    setup = config.setup
    cut = _cutoff(cutoff, lam, config.scheme)
    if config.scheme is Scheme.SINGLE:
        sq = squeezed_vacuum_state(lam, FockCutoff(cut.n_max, lam))
        vac = np.zeros(cut.dim)
        vac[0] = 1.0
        psi = beam_splitter(FockStateVector(np.multiply.outer(sq.amplitudes, vac)), 0, 1, setup.split_angle)
    else:
        psi = two_mode_input(lam, cut, setup.split_angle)
    rho = psi.density()
    for mode in (0, 1):
        rho = loss_channel(rho, mode, setup.TL)
    for mode in (0, 1):
        rho = detect_on(rho, mode, setup.tap_angle, config.detector)
    prob = rho.trace()
    if not prob >= _MIN_PROBABILITY:
        raise DegenerateConditioning(f"heralding probability {prob:.3e} is zero for {config.as_dict()}")
    rho = rho.normalized()
    if config.scheme is Scheme.SINGLE:
        rho = beam_splitter(rho, 0, 1, -setup.split_angle)
    return rho, prob


def dakna_conditional_state(lam: float, T: float, cutoff) -> tuple[DensityOperator, float]:
    """Subtract photons with one tap whose output is split 50:50 onto two detectors.

    The tapped light of a single squeezed mode ``A`` goes to ancilla ``C``,
    ``C`` is split with ancilla ``D``, and both ideal detectors must fire.
    Simulated as a three-mode pure state.

    Returns:
        ``(rho_A, probability)``.
    """
    cut = FockCutoff(cutoff.n_max if isinstance(cutoff, FockCutoff) else int(cutoff), lam)
    d = cut.dim
    psi = np.zeros((d, d, d), dtype=complex)
    psi[:, 0, 0] = squeezed_vacuum_state(lam, cut).amplitudes
    tap = math.atan(math.sqrt((1.0 - T) / T))
    psi = beam_splitter(FockStateVector(psi), 0, 1, tap)
    psi = beam_splitter(psi, 1, 2, math.pi / 4).amplitudes
    _, on = on_off_povm(DetectorModel(), d)
    weight = np.sqrt(np.multiply.outer(on.weights, on.weights))
    kept = (psi * weight[None, :, :]).reshape(d, d * d)
    rho = kept @ kept.conj().T
    prob = float(np.trace(rho).real)
    if not prob >= _MIN_PROBABILITY:
        raise DegenerateConditioning(f"heralding probability {prob:.3e} is zero at lambda={lam}")
    return DensityOperator(rho / prob), prob


def vacuum_overlap(rho: DensityOperator, mode: int) -> float:
    """``<0|rho_mode|0>`` of one mode's reduced state."""
    return float(rho.reduced(mode).tensor[0, 0].real)


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """``(1/2) ||a - b||_1``; the smaller box is zero-padded to the larger."""
    ma, mb = a.matrix, b.matrix
    n = max(ma.shape[0], mb.shape[0])
    pa = np.zeros((n, n), dtype=complex)
    pb = np.zeros((n, n), dtype=complex)
    pa[: ma.shape[0], : ma.shape[0]] = ma
    pb[: mb.shape[0], : mb.shape[0]] = mb
    diff = pa - pb
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))
