"""Truncated Fock-space states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..config import Scheme
from ..errors import CutoffTooSmall

__all__ = [
    "TAIL_TOLERANCE",
    "FockCutoff",
    "FockStateVector",
    "DensityOperator",
    "squeezed_amplitudes",
    "squeezed_vacuum_state",
    "vacuum_state",
    "number_state",
    "squeezed_tail",
    "two_mode_tail",
]

TAIL_TOLERANCE = 1e-10


def squeezed_amplitudes(lam: float, n_max: int) -> np.ndarray:
    """Fock amplitudes of ``S(r)|0>`` up to ``n_max``.

    ``S(r) = exp[-(r/2)(a^dagger^2 - a^2)]`` disentangles to
    ``(1 - lam^2)^(1/4) exp(-lam a^dagger^2 / 2)|0>``, so
    ``c_2n = (1 - lam^2)^(1/4) (-lam)^n sqrt((2n)!) / (2^n n!)``.
    Negative ``lam`` gives the state squeezed along ``p``.
    """
    out = np.zeros(n_max + 1)
    n = np.arange(0, n_max // 2 + 1)
    if lam == 0.0:
        out[0] = 1.0
        return out
    log_mag = 0.5 * gammaln(2 * n + 1) - n * math.log(2.0) - gammaln(n + 1) + n * math.log(abs(lam))
    sign = np.where(n % 2 == 1, -np.sign(lam), 1.0)
    out[2 * n] = (1.0 - lam * lam) ** 0.25 * sign * np.exp(log_mag)
    return out


def squeezed_tail(lam: float, n_max: int) -> float:
    """Squeezed-vacuum probability above ``n_max`` photons."""
    lam2 = lam * lam
    if lam2 == 0.0:
        return 0.0
    n = n_max // 2 + 1
    # |c_2n|^2 = sqrt(1 - lam^2) lam^(2n) (2n)! / (4^n (n!)^2); successive ratio < lam^2
    log_term = 0.5 * math.log1p(-lam2) + n * math.log(lam2) + gammaln(2 * n + 1) - n * math.log(4.0) - 2 * gammaln(n + 1)
    term = math.exp(log_term)
    total = 0.0
    while term > 1e-40 * max(total, 1e-300) and term > 0.0:
        total += term
        term *= lam2 * (2 * n + 1) / (2 * n + 2)
        n += 1
    return total


def two_mode_tail(lam: float, n_max: int) -> float:
    """Two-mode squeezed-vacuum probability above ``n_max`` total photons."""
    return (lam * lam) ** (n_max // 2 + 1)


@dataclass(frozen=True)
class FockCutoff:
    """Photon-number truncation; ``n_max`` bounds each mode (two-mode states: the total)."""

    n_max: int
    lam: float = 0.0
    scheme: Scheme = Scheme.SINGLE

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError(f"cutoff must be an integer >= 2, got {self.n_max!r}")
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.tail > TAIL_TOLERANCE:
            raise CutoffTooSmall(
                f"cutoff {self.n_max} leaves {self.tail:.3e} of the state at lambda={self.lam}"
            )

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def tail(self) -> float:
        if self.scheme is Scheme.TWO:
            return two_mode_tail(self.lam, self.n_max)
        return squeezed_tail(self.lam, self.n_max)

    @classmethod
    def minimal(cls, lam: float, scheme: Scheme | str = Scheme.SINGLE, floor: int = 8) -> "FockCutoff":
        """Smallest cutoff (at least ``floor``) meeting the truncation bound."""
        n = floor
        scheme = Scheme.parse(scheme)
        while True:
            try:
                return cls(n, lam, scheme)
            except CutoffTooSmall:
                n += 2


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FockStateVector:
    """Pure state stored as a tensor with one axis per mode."""

    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _freeze(self.amplitudes))

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amplitudes.shape

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityOperator":
        psi = self.amplitudes
        return DensityOperator(np.multiply.outer(psi, psi.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Density operator stored as ``rho[ket_0, ..., ket_k, bra_0, ..., bra_k]``."""

    tensor: np.ndarray

    def __post_init__(self):
        t = _freeze(self.tensor)
        if t.ndim % 2 or t.shape[: t.ndim // 2] != t.shape[t.ndim // 2 :]:
            raise ValueError(f"tensor shape {t.shape} is not of ket/bra form")
        object.__setattr__(self, "tensor", t)

    @property
    def mode_count(self) -> int:
        return self.tensor.ndim // 2

    @property
    def dims(self) -> tuple[int, ...]:
        return self.tensor.shape[: self.mode_count]

    @property
    def matrix(self) -> np.ndarray:
        size = int(np.prod(self.dims))
        return self.tensor.reshape(size, size)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityOperator":
        return DensityOperator(self.tensor / self.trace())

    def hermiticity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T), initial=0.0))

    def min_eigenvalue(self) -> float:
        m = self.matrix
        return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])

    def reduced(self, mode: int) -> "DensityOperator":
        """Partial trace over every mode except ``mode``."""
        k = self.mode_count
        if not 0 <= mode < k:
            raise ValueError(f"mode {mode} out of range for {k} modes")
        if k == 1:
            return self
        letters = "abcdefghij"
        ket = [letters[i] for i in range(k)]
        bra = [letters[i] if i != mode else "z" for i in range(k)]
        spec = "".join(ket) + "".join(bra) + "->" + letters[mode] + "z"
        return DensityOperator(np.einsum(spec, self.tensor))

    def expectation(self, op: np.ndarray, mode: int = 0) -> complex:
        r = self.reduced(mode).tensor
        return complex(np.einsum("ij,ji->", r, op))


def vacuum_state(dim: int, modes: int = 1) -> FockStateVector:
    psi = np.zeros((dim,) * modes, dtype=complex)
    psi[(0,) * modes] = 1.0
    return FockStateVector(psi)


def number_state(n: int, dim: int) -> FockStateVector:
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return FockStateVector(psi)


def squeezed_vacuum_state(lam: float, cutoff: FockCutoff | int) -> FockStateVector:
    """Single-mode squeezed vacuum ``S(r)|0>`` with ``lam = tanh r``.

    Raises:
        CutoffTooSmall: The truncated tail exceeds the bound.
    """
    if not isinstance(cutoff, FockCutoff):
        cutoff = FockCutoff(int(cutoff), abs(lam))
    elif squeezed_tail(lam, cutoff.n_max) > TAIL_TOLERANCE:
        raise CutoffTooSmall(f"cutoff {cutoff.n_max} too small for lambda={lam}")
    return FockStateVector(squeezed_amplitudes(lam, cutoff.n_max))
