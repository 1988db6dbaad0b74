"""Closed-form statistics of photon-subtracted squeezed vacua.

Every heralded quantity is a signed sum of four Gaussian terms indexed by
``(i, j)`` in ``{0, 1}**2``; ``i`` (``j``) is 1 when detector C (D) is traced
out and 0 when its "off" element is projected. Imperfections enter only
through the effective reflectances ``gamma'`` and the weights
``(-1)**(i+j) * exp(-(2-i-j)*nu)``, so the lossless perfect-detector
formulas are the ``(T_L, eta, nu) = (1, 1, 0)`` special case of one code
path.

Units: ``x = (a + a^dagger)/sqrt(2)``; vacuum variance 1/2. Two-mode
quantities refer to the Bell variables ``x_A - x_B`` and ``p_A + p_B``,
whose vacuum variance is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import ExperimentConfig, Scheme
from .errors import DegenerateConditioning, NotIdeal

__all__ = [
    "INDICES",
    "GammaTable",
    "GaussianTerm",
    "SignedGaussianMixture",
    "QuadraturePoint",
    "PhasePoint",
    "gamma_table",
    "component_weights",
    "detection_probability",
    "homodyne_mixture",
    "pdf_at",
    "variance",
    "reference_variance",
    "reference_mixture",
    "wigner_mixture",
    "wigner_single",
    "mean_photon_single_ideal",
]

INDICES = ((1, 1), (1, 0), (0, 1), (0, 0))

# Components whose quadratic denominators fall below this are treated as degenerate.
_DEGENERATE_D = 1e-14


@dataclass(frozen=True)
class GammaTable:
    """Effective tap reflectances.

    For the single-mode scheme ``values`` maps ``(i, j)`` to ``gamma'_ij``;
    for the two-mode scheme it maps ``i`` to ``gamma'_i`` and a component
    ``(i, j)`` uses the pair ``(gamma'_i, gamma'_j)``.
    """

    scheme: Scheme
    values: Mapping

    def __getitem__(self, key):
        return self.values[key]

    def pair(self, i: int, j: int) -> tuple[float, float]:
        if self.scheme is Scheme.SINGLE:
            g = self.values[(i, j)]
            return g, g
        return self.values[i], self.values[j]


def gamma_table(config: ExperimentConfig) -> GammaTable:
    s, eta = config.setup, config.detector.efficiency
    loss_r = s.TL * s.R
    if config.scheme is Scheme.SINGLE:
        values = {
            (1, 1): loss_r,
            (1, 0): (2.0 - eta) * loss_r / 2.0,
            (0, 1): (2.0 - eta) * loss_r / 2.0,
            (0, 0): (1.0 - eta) * loss_r,
        }
    else:
        values = {1: loss_r, 0: (1.0 - eta) * loss_r}
    return GammaTable(config.scheme, values)


def component_weights(nu: float) -> dict[tuple[int, int], float]:
    return {(i, j): (-1) ** (i + j) * math.exp(-(2 - i - j) * nu) for i, j in INDICES}


@dataclass(frozen=True)
class QuadraturePoint:
    x: float
    quad_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "quad_phase", float(self.quad_phase) % (2.0 * math.pi))


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float


@dataclass(frozen=True)
class GaussianTerm:
    """One term ``weight * amplitude * exp(-coeff_x x^2 - coeff_p p^2)``."""

    weight: float
    amplitude: float
    coeff_x: float
    coeff_p: float | None = None
    index: tuple[int, int] | None = None
    # mass - 1, when the producer can supply it without cancellation
    mass_excess: float | None = None

    @property
    def mass(self) -> float:
        if self.mass_excess is not None:
            return 1.0 + self.mass_excess
        m = self.amplitude * math.sqrt(math.pi / self.coeff_x)
        if self.coeff_p is not None:
            m *= math.sqrt(math.pi / self.coeff_p)
        return m

    def moment2(self, axis: str = "x") -> float:
        """Unweighted ``integral of axis^2 * term``."""
        c = self.coeff_x if axis == "x" else self.coeff_p
        if c is None:
            raise ValueError("1-D term has no p axis")
        return self.mass / (2.0 * c)


@dataclass(frozen=True)
class SignedGaussianMixture:
    """Centered signed Gaussian mixture divided by ``normalization``."""

    components: tuple[GaussianTerm, ...]
    normalization: float
    # exact sum of weights; with per-term mass excesses it lets total_mass
    # avoid cancelling O(1) masses against a small normalization
    weight_sum: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        dims = {c.coeff_p is None for c in self.components}
        if len(dims) != 1:
            raise ValueError("mixture components must share dimensionality")

    @property
    def ndim(self) -> int:
        return 1 if self.components[0].coeff_p is None else 2

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(c.weight for c in self.components)

    def pdf(self, x, p=None):
        x = np.asarray(x, dtype=float)
        if self.ndim == 2:
            if p is None:
                raise ValueError("2-D mixture needs both x and p")
            p = np.asarray(p, dtype=float)

        def exponent(cx, cp):
            arg = cx * x**2
            if self.ndim == 2:
                arg = arg + cp * p**2
            return arg

        if self.weight_sum is None:
            out = 0.0
            for c in self.components:
                out = out + c.weight * c.amplitude * np.exp(-exponent(c.coeff_x, c.coeff_p))
            return out / self.normalization
        # f_ref * (weight_sum + sum_t w_t (f_t / f_ref - 1)): exact when the terms coincide
        ref = self.components[0]
        base = ref.amplitude * np.exp(-exponent(ref.coeff_x, ref.coeff_p))
        corr = 0.0
        for c in self.components[1:]:
            dp = None if self.ndim == 1 else c.coeff_p - ref.coeff_p
            shift = math.log(c.amplitude / ref.amplitude) - exponent(c.coeff_x - ref.coeff_x, dp)
            corr = corr + c.weight * np.expm1(shift)
        return base * (self.weight_sum + corr) / self.normalization

    __call__ = pdf

    def total_mass(self) -> float:
        if self.weight_sum is not None and all(c.mass_excess is not None for c in self.components):
            excess = math.fsum(c.weight * c.mass_excess for c in self.components)
            return (self.weight_sum + excess) / self.normalization
        return math.fsum(c.weight * c.mass for c in self.components) / self.normalization

    def second_moment(self, axis: str = "x") -> float:
        if self.weight_sum is None:
            return sum(c.weight * c.moment2(axis) for c in self.components) / self.normalization
        ref = self.components[0].moment2(axis)
        corr = math.fsum(c.weight * (c.moment2(axis) - ref) for c in self.components[1:])
        return (self.weight_sum * ref + corr) / self.normalization

    def variance(self, axis: str = "x") -> float:
        # Every term is centered, so the first moment vanishes identically.
        return self.second_moment(axis)

    def marginal(self, axis: str = "x") -> "SignedGaussianMixture":
        """Integrate out the other phase-space variable."""
        if self.ndim == 1:
            return self
        terms = []
        for c in self.components:
            keep, drop = (c.coeff_x, c.coeff_p) if axis == "x" else (c.coeff_p, c.coeff_x)
            terms.append(
                GaussianTerm(
                    c.weight, c.amplitude * math.sqrt(math.pi / drop), keep, None, c.index, c.mass_excess
                )
            )
        return SignedGaussianMixture(tuple(terms), self.normalization, self.weight_sum)


def pdf_at(mixture: SignedGaussianMixture, point) -> float:
    """Evaluate a mixture at a :class:`QuadraturePoint`, :class:`PhasePoint` or raw coordinates.

    The quadrature phase of a ``QuadraturePoint`` is informational; it must
    match the phase the mixture was built for.
    """
    if isinstance(point, PhasePoint):
        return float(mixture.pdf(point.x, point.p))
    if isinstance(point, QuadraturePoint):
        return float(mixture.pdf(point.x))
    if mixture.ndim == 2:
        x, p = point
        return float(mixture.pdf(x, p))
    return float(mixture.pdf(point))


# --- per-component algebra -------------------------------------------------


@dataclass(frozen=True)
class _Term:
    index: tuple[int, int]
    weight: float
    E: float  # numerator of the quadratic coefficient
    D0: float  # denominator at quad_phase = 0
    F: float  # Wigner p-denominator (single-mode only)
    excess: float  # unnormalized probability mass of the term, minus one


def _terms(config: ExperimentConfig) -> list[_Term]:
    lam = config.lam
    lam2 = lam * lam
    a = config.setup.TL * config.setup.T
    delta = _spacing(config)
    weights = component_weights(config.detector.dark_mean)
    out = []
    for idx in INDICES:
        i, j = idx
        # u = T_L T + R_L + gamma'; written via the exact spacing so that the
        # terms agree with detection_probability to rounding
        if config.scheme is Scheme.SINGLE:
            ui = uj = 1.0 - (2 - i - j) * delta
        else:
            ui, uj = 1.0 - (1 - i) * delta, 1.0 - (1 - j) * delta
        si, sj = ui - a, uj - a
        E = 1.0 - lam2 * ui * uj
        D0 = (1.0 - lam * a) ** 2 - lam2 * si * sj
        F = 1.0 - lam2 * (a - si) * (a - sj)
        if config.scheme is Scheme.SINGLE:
            excess = math.expm1(0.5 * (math.log1p(-lam2) - math.log1p(-lam2 * ui * ui)))
        else:
            excess = -lam2 * (1.0 - ui * uj) / E
        out.append(_Term(idx, weights[idx], E, D0, F, excess))
    return out


def _weight_sum(nu: float) -> float:
    return math.expm1(-nu) ** 2


def _spacing(config: ExperimentConfig) -> float:
    """``1 - u_10`` for the single-mode scheme; ``1 - u_0`` for the two-mode scheme."""
    s = config.setup
    full = config.detector.efficiency * s.TL * s.R
    return full / 2.0 if config.scheme is Scheme.SINGLE else full


def detection_probability(config: ExperimentConfig) -> float:
    """Probability that both heralding detectors fire.

    The four-term sum cancels to ``O(lambda^2)`` against terms of order one,
    so it is evaluated through exact divided differences instead of the
    textbook form.
    """
    lam = config.lam
    lam2 = lam * lam
    delta = _spacing(config)
    one_minus_e = -math.expm1(-config.detector.dark_mean)
    c2 = 1.0 - lam2
    if config.scheme is Scheme.SINGLE:
        c = math.sqrt(c2)
        u = (1.0, 1.0 - delta, 1.0 - 2.0 * delta)
        root = [math.sqrt(1.0 - lam2 * v * v) for v in u]

        def G(k: int) -> float:
            a, b = u[k], u[k + 1]
            return (a + b) / (root[k] * root[k + 1] * (root[k] + root[k + 1]))

        second = c * lam2 * delta * (G(0) - G(1))
        first = c * lam2 * delta * G(1)
        last = c / root[2]
    else:
        u0 = 1.0 - delta
        E11, E10, E00 = c2, 1.0 - lam2 * u0, 1.0 - lam2 * u0 * u0
        second = c2 * lam2 * delta**2 * (1.0 + lam2 * u0) / (E11 * E10 * E00)
        first = c2 * lam2 * u0 * delta / (E10 * E00)
        last = c2 / E00
    return second + one_minus_e * (2.0 * first + one_minus_e * last)


def _checked_terms(config: ExperimentConfig) -> tuple[list[_Term], float]:
    prob = detection_probability(config)
    if not prob > 0.0:
        raise DegenerateConditioning(
            f"heralding probability is zero for {config.as_dict()}; no conditional state"
        )
    terms = _terms(config)
    if min(t.D0 for t in terms) <= _DEGENERATE_D:
        raise DegenerateConditioning("numerically degenerate Gaussian term")
    return terms, prob


def homodyne_mixture(config: ExperimentConfig, quad_phase: float = 0.0) -> SignedGaussianMixture:
    """Heralded homodyne statistics as a signed Gaussian mixture.

    Single-mode: the 1-D distribution of ``x_phi`` on the output mode.
    Two-mode: the 2-D Bell-measurement distribution of ``(x_A - x_B, p_A + p_B)``,
    which is isotropic so ``quad_phase`` has no effect.
    """
    terms, prob = _checked_terms(config)
    lam = config.lam
    c2 = 1.0 - lam**2
    out = []
    if config.scheme is Scheme.SINGLE:
        a = config.setup.TL * config.setup.T
        bump = 4.0 * lam * a * math.sin(quad_phase) ** 2
        for t in terms:
            D = t.D0 + bump
            amp = math.sqrt(c2 / D) / math.sqrt(math.pi)
            out.append(GaussianTerm(t.weight, amp, t.E / D, None, t.index, t.excess))
    else:
        for t in terms:
            coeff = t.E / (2.0 * t.D0)
            amp = c2 / t.D0 / (2.0 * math.pi)
            out.append(GaussianTerm(t.weight, amp, coeff, coeff, t.index, t.excess))
    return SignedGaussianMixture(tuple(out), prob, _weight_sum(config.detector.dark_mean))


def wigner_mixture(config: ExperimentConfig) -> SignedGaussianMixture:
    if config.scheme is not Scheme.SINGLE:
        raise ValueError("the Wigner function closed form exists for the single-mode scheme only")
    terms, prob = _checked_terms(config)
    c2 = 1.0 - config.lam**2
    out = [
        GaussianTerm(t.weight, math.sqrt(c2 / t.F) / math.pi, t.E / t.D0, t.D0 / t.F, t.index, t.excess)
        for t in terms
    ]
    return SignedGaussianMixture(tuple(out), prob, _weight_sum(config.detector.dark_mean))


def wigner_single(config: ExperimentConfig, x, p):
    return wigner_mixture(config).pdf(x, p)


def variance(config: ExperimentConfig, quad_phase: float = 0.0) -> float:
    """Heralded quadrature variance (Bell-variable variance for the two-mode scheme)."""
    return homodyne_mixture(config, quad_phase).variance("x")


def reference_variance(
    lam: float, scheme: Scheme | str = Scheme.SINGLE, apply_loss: bool = False, TL: float = 1.0
) -> float:
    """Variance of the un-subtracted squeezed vacuum, optionally after path loss ``TL``."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda must lie in [0, 1), got {lam!r}")
    v = (1.0 - lam) / (2.0 * (1.0 + lam))
    if apply_loss:
        v = TL * v + (1.0 - TL) / 2.0
    return 2.0 * v if Scheme.parse(scheme) is Scheme.TWO else v


def reference_mixture(
    lam: float, scheme: Scheme | str = Scheme.SINGLE, apply_loss: bool = False, TL: float = 1.0
) -> SignedGaussianMixture:
    """Homodyne (single) or Bell (two) distribution of the un-subtracted state."""
    v = reference_variance(lam, scheme, apply_loss, TL)
    coeff = 1.0 / (2.0 * v)
    if Scheme.parse(scheme) is Scheme.SINGLE:
        term = GaussianTerm(1.0, 1.0 / math.sqrt(2.0 * math.pi * v), coeff)
    else:
        term = GaussianTerm(1.0, 1.0 / (2.0 * math.pi * v), coeff, coeff)
    return SignedGaussianMixture((term,), 1.0)


def mean_photon_single_ideal(config: ExperimentConfig) -> float:
    """Mean photon number of the heralded single-mode state (ideal setup only)."""
    if config.scheme is not Scheme.SINGLE:
        raise ValueError("mean photon closed form exists for the single-mode scheme only")
    if not config.is_ideal:
        raise NotIdeal("no closed form with imperfections; use the Fock-space engine")
    lam = config.lam
    if lam <= 0.0:
        raise DegenerateConditioning("lambda must be positive for a heralded state")
    T = config.setup.T
    delta = _spacing(config)
    lam2 = lam * lam
    # Component (i,j) contributes c*lam^2*T*u/s(u)^3 with u equally spaced, so
    # the signed sum is a second difference; u itself drops out exactly.
    h = []
    for k in range(3):
        u = 1.0 - k * delta
        h.append(u * math.expm1(-1.5 * math.log1p(-lam2 * u * u)))
    second = h[0] - 2.0 * h[1] + h[2]
    return math.sqrt(1.0 - lam2) * lam2 * T * second / detection_probability(config)
