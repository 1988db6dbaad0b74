import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from photonsub import ExperimentConfig, Scheme
from photonsub import gaussian_core as gc
from photonsub.errors import DegenerateConditioning, NotIdeal

mp.mp.dps = 50

LAMBDAS = [0.02, 0.1, 0.3, 0.47, 0.67, 0.9, 0.97]


# --- textbook ideal closed forms at 50 digits --------------------------------


def _single_gammas(T):
    R = 1 - T
    return {(1, 1): R, (1, 0): R / 2, (0, 1): R / 2, (0, 0): mp.mpf(0)}


def oracle_pdet_single(lam, T):
    lam, T = mp.mpf(lam), mp.mpf(T)
    c = 1 - lam**2
    return 1 - 2 * mp.sqrt(c / (1 - lam**2 * ((1 + T) / 2) ** 2)) + mp.sqrt(c / (1 - lam**2 * T**2))


def oracle_pdet_two(lam, T):
    lam, T = mp.mpf(lam), mp.mpf(T)
    return lam**2 * (1 - T) ** 2 * (1 + lam**2 * T) / ((1 - lam**2 * T) * (1 - lam**2 * T**2))


def oracle_variance_single(lam, T):
    lam, T = mp.mpf(lam), mp.mpf(T)
    P = oracle_pdet_single(lam, T)
    total = 0
    for (i, j), g in _single_gammas(T).items():
        v = (
            mp.sqrt(1 - lam**2)
            / (2 * P)
            * ((1 - lam * T) ** 2 - lam**2 * g**2)
            / (1 - lam**2 * (T + g) ** 2) ** mp.mpf(1.5)
        )
        total += (-1) ** (i + j) * v
    return total


def oracle_variance_two(lam, T):
    lam, T = mp.mpf(lam), mp.mpf(T)
    P = oracle_pdet_two(lam, T)
    g = {1: 1 - T, 0: mp.mpf(0)}
    total = 0
    for i in (0, 1):
        for j in (0, 1):
            v = (
                (1 - lam**2)
                * ((1 - lam * T) ** 2 - lam**2 * g[i] * g[j])
                / (1 - lam**2 * (T + g[i]) * (T + g[j])) ** 2
                / P
            )
            total += (-1) ** (i + j) * v
    return total


def oracle_mean_photon(lam, T):
    lam, T = mp.mpf(lam), mp.mpf(T)
    P = oracle_pdet_single(lam, T)
    total = 0
    for (i, j), g in _single_gammas(T).items():
        u = T + g
        n = mp.sqrt((1 - lam**2) / (1 - lam**2 * u**2)) * lam**2 * T * u / (1 - lam**2 * u**2) / P
        total += (-1) ** (i + j) * n
    return total


def oracle_pdet_practical_single(lam, T, TL, eta, nu):
    lam, T, TL, eta, nu = (mp.mpf(v) for v in (lam, T, TL, eta, nu))
    R, RL = 1 - T, 1 - TL
    g = {(1, 1): TL * R, (1, 0): (2 - eta) * TL * R / 2, (0, 1): (2 - eta) * TL * R / 2, (0, 0): (1 - eta) * TL * R}
    total = 0
    for (i, j), gij in g.items():
        u = TL * T + RL + gij
        w = (-1) ** (i + j) * mp.exp(-(2 - i - j) * nu)
        total += w * mp.sqrt((1 - lam**2) / (1 - lam**2 * u**2))
    return total


# --- tables and weights -----------------------------------------------------


def test_gamma_table_ideal_single(ideal):
    g = gc.gamma_table(ideal())
    assert [g[k] for k in gc.INDICES] == pytest.approx([0.1, 0.05, 0.05, 0.0], abs=1e-15)


def test_gamma_table_practical_single(practical):
    g = gc.gamma_table(practical())
    assert g[(1, 1)] == pytest.approx(0.075, abs=1e-15)
    assert g[(1, 0)] == pytest.approx(0.0525, abs=1e-15)
    assert g[(0, 0)] == pytest.approx(0.03, abs=1e-15)


def test_gamma_table_practical_two(practical):
    g = gc.gamma_table(practical(scheme="two"))
    assert (g[0], g[1]) == pytest.approx((0.03, 0.075), abs=1e-15)
    assert g.pair(1, 0) == pytest.approx((0.075, 0.03), abs=1e-15)


def test_component_weights():
    w = gc.component_weights(1e-3)
    assert w[(1, 1)] == 1.0
    assert w[(1, 0)] == w[(0, 1)] == pytest.approx(-math.exp(-1e-3), rel=1e-15)
    assert w[(0, 0)] == pytest.approx(math.exp(-2e-3), rel=1e-15)


# --- detection probability --------------------------------------------------


@pytest.mark.parametrize("lam", LAMBDAS)
def test_pdet_single_matches_ideal_closed_form(lam):
    got = gc.detection_probability(ExperimentConfig.create(lam))
    want = oracle_pdet_single(lam, 0.9)
    assert got == pytest.approx(float(want), rel=1e-12)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_pdet_two_matches_ideal_closed_form(lam):
    got = gc.detection_probability(ExperimentConfig.create(lam, scheme="two"))
    assert got == pytest.approx(float(oracle_pdet_two(lam, 0.9)), rel=1e-12)


@pytest.mark.parametrize("lam", [0.05, 0.4, 0.8])
def test_pdet_practical_single_matches_signed_sum(lam):
    got = gc.detection_probability(ExperimentConfig.practical(lam))
    want = oracle_pdet_practical_single(lam, 0.9, 0.75, 0.6, 1e-3)
    assert got == pytest.approx(float(want), rel=1e-12)


def test_pdet_vacuum_ideal_is_zero(ideal):
    assert gc.detection_probability(ideal(0.0)) == 0.0
    assert gc.detection_probability(ideal(0.0, scheme="two")) == 0.0


@pytest.mark.parametrize("scheme", ["single", "two"])
@pytest.mark.parametrize("TL, eta", [(0.75, 0.6), (1.0, 1.0), (0.3, 0.2)])
def test_pdet_vacuum_dark_counts_only(scheme, TL, eta):
    cfg = ExperimentConfig.create(0.0, TL=TL, eta=eta, nu=1e-3, scheme=scheme)
    assert gc.detection_probability(cfg) == pytest.approx(math.expm1(-1e-3) ** 2, rel=1e-13)
    assert gc.detection_probability(cfg) == pytest.approx(9.995e-7, rel=1e-3)


@settings(max_examples=60, deadline=None)
@given(
    lam=st.floats(0.0, 0.98),
    T=st.floats(0.05, 0.99),
    TL=st.floats(0.05, 1.0),
    eta=st.floats(0.05, 1.0),
    nu=st.floats(0.0, 0.1),
    scheme=st.sampled_from(["single", "two"]),
)
def test_pdet_is_a_probability(lam, T, TL, eta, nu, scheme):
    p = gc.detection_probability(ExperimentConfig.create(lam, T=T, TL=TL, eta=eta, nu=nu, scheme=scheme))
    assert 0.0 <= p <= 1.0


# --- homodyne mixtures -------------------------------------------------------


@pytest.mark.parametrize("scheme", ["single", "two"])
@pytest.mark.parametrize("lam", [0.02, 0.2, 0.5, 0.8, 0.97])
@pytest.mark.parametrize("kind", ["ideal", "practical"])
def test_mass_identity(scheme, lam, kind):
    make = ExperimentConfig.create if kind == "ideal" else ExperimentConfig.practical
    mix = gc.homodyne_mixture(make(lam, scheme=scheme))
    assert abs(mix.total_mass() - 1.0) <= 1e-12


@pytest.mark.parametrize("lam", [0.1, 0.4, 0.8])
@pytest.mark.parametrize("kind", ["ideal", "practical"])
@pytest.mark.parametrize("phase", [0.0, 0.7, math.pi / 2])
def test_single_pdf_integrates_to_one_and_variance_agrees(lam, kind, phase):
    make = ExperimentConfig.create if kind == "ideal" else ExperimentConfig.practical
    cfg = make(lam)
    mix = gc.homodyne_mixture(cfg, phase)
    norm, _ = integrate.quad(mix.pdf, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)
    second, _ = integrate.quad(lambda x: x * x * mix.pdf(x), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)
    assert abs(norm - 1.0) <= 1e-9
    assert second == pytest.approx(gc.variance(cfg, phase), abs=1e-9)


@pytest.mark.parametrize("lam", [0.2, 0.6])
def test_two_mode_pdf_integrates_to_one(lam, practical):
    mix = gc.homodyne_mixture(practical(lam, scheme="two"))
    norm, _ = integrate.dblquad(lambda p, x: mix.pdf(x, p), -12, 12, -12, 12, epsabs=1e-12, epsrel=1e-12)
    assert abs(norm - 1.0) <= 1e-9


@pytest.mark.parametrize("nu", [1e-3, 0.2])
@pytest.mark.parametrize("phase", [0.0, 1.1])
def test_dark_count_only_conditioning_gives_vacuum(nu, phase):
    cfg = ExperimentConfig.create(0.0, TL=0.75, eta=0.6, nu=nu)
    mix = gc.homodyne_mixture(cfg, phase)
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(mix.pdf(x), np.exp(-x * x) / math.sqrt(math.pi), rtol=0, atol=1e-14)
    assert gc.pdf_at(mix, gc.QuadraturePoint(0.0, phase)) == pytest.approx(0.5641895835, abs=1e-10)


def test_ideal_pdf_peak_exceeds_squeezed_peak(ideal):
    lam = 0.4
    peak = gc.homodyne_mixture(ideal(lam)).pdf(0.0)
    squeezed = gc.reference_mixture(lam).pdf(0.0)
    assert peak > squeezed


def test_ideal_pdf_has_side_lobes_that_practical_loses(ideal, practical):
    x = np.linspace(0.0, 4.0, 801)
    ideal_pdf = gc.homodyne_mixture(ideal(0.4)).pdf(x)
    practical_pdf = gc.homodyne_mixture(practical(0.4)).pdf(x)
    # a side lobe is a local maximum away from the origin
    ideal_peaks = np.nonzero((ideal_pdf[1:-1] > ideal_pdf[:-2]) & (ideal_pdf[1:-1] > ideal_pdf[2:]))[0]
    practical_peaks = np.nonzero(
        (practical_pdf[1:-1] > practical_pdf[:-2]) & (practical_pdf[1:-1] > practical_pdf[2:])
    )[0]
    assert ideal_peaks.size == 1
    assert practical_peaks.size == 0


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.05, 0.9), phase=st.floats(0.0, 2 * math.pi), x=st.floats(-4, 4))
def test_phase_symmetry(lam, phase, x):
    cfg = ExperimentConfig.practical(lam)
    a = gc.homodyne_mixture(cfg, phase)
    b = gc.homodyne_mixture(cfg, phase + math.pi)
    # phase + pi is itself rounded; the signed sum magnifies that by its condition number
    tol = 16 * np.finfo(float).eps * _evaluation_condition(a)
    unsigned = sum(abs(c.weight) * c.amplitude * math.exp(-c.coeff_x * x * x) for c in a.components)
    pdf_tol = 16 * np.finfo(float).eps * unsigned / a.normalization
    assert a.pdf(x) == pytest.approx(b.pdf(x), abs=max(pdf_tol, 1e-300))
    assert gc.variance(cfg, phase) == pytest.approx(gc.variance(cfg, phase + math.pi), rel=tol)


def test_pdf_at_accepts_phase_points(ideal):
    mix = gc.homodyne_mixture(ideal(0.4, scheme="two"))
    assert gc.pdf_at(mix, gc.PhasePoint(0.3, -0.2)) == pytest.approx(float(mix.pdf(0.3, -0.2)), rel=1e-15)
    assert gc.pdf_at(mix, (0.3, -0.2)) == gc.pdf_at(mix, gc.PhasePoint(0.3, -0.2))


def test_two_mode_mixture_is_isotropic(practical):
    cfg = practical(0.5, scheme="two")
    mix = gc.homodyne_mixture(cfg)
    assert mix.variance("x") == pytest.approx(mix.variance("p"), rel=1e-14)
    m = mix.marginal("x")
    assert m.ndim == 1
    assert m.pdf(0.7) == pytest.approx(mix.marginal("p").pdf(0.7), rel=1e-14)


# --- variances ---------------------------------------------------------------


def _evaluation_condition(mix):
    # ratio of the unsigned to the signed term sum; rounding is amplified by it
    terms = [c.weight * c.moment2() for c in mix.components]
    return math.fsum(abs(t) for t in terms) / abs(math.fsum(terms))


@pytest.mark.parametrize("lam", LAMBDAS)
def test_ideal_single_variance_matches_closed_form(lam):
    cfg = ExperimentConfig.create(lam)
    got = gc.variance(cfg)
    tol = max(1e-13, 16 * np.finfo(float).eps * _evaluation_condition(gc.homodyne_mixture(cfg)))
    assert got == pytest.approx(float(oracle_variance_single(lam, 0.9)), rel=tol)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_ideal_two_variance_matches_closed_form(lam):
    cfg = ExperimentConfig.create(lam, scheme="two")
    tol = max(1e-13, 16 * np.finfo(float).eps * _evaluation_condition(gc.homodyne_mixture(cfg)))
    assert gc.variance(cfg) == pytest.approx(float(oracle_variance_two(lam, 0.9)), rel=tol)


def test_variance_high_transmittance_limit():
    # a barely tapped beam leaves the squeezed vacuum
    cfg = ExperimentConfig.create(0.5, T=0.99999)
    assert gc.variance(cfg) == pytest.approx(1.0 / 6.0, abs=1e-4)


@pytest.mark.parametrize(
    "lam, scheme, apply_loss, TL, want",
    [
        (0.0, "single", False, 1.0, 0.5),
        (0.5, "single", False, 1.0, 1.0 / 6.0),
        (0.5, "single", True, 0.75, 0.25),
        (0.5, "two", False, 1.0, 1.0 / 3.0),
        (0.0, "two", True, 0.75, 1.0),
    ],
)
def test_reference_variance(lam, scheme, apply_loss, TL, want):
    assert gc.reference_variance(lam, scheme, apply_loss, TL) == pytest.approx(want, rel=1e-15)


def test_reference_variance_rejects_range():
    with pytest.raises(ValueError):
        gc.reference_variance(1.0)


def test_reference_mixture_variance():
    mix = gc.reference_mixture(0.3, Scheme.TWO, True, 0.75)
    assert mix.variance() == pytest.approx(gc.reference_variance(0.3, Scheme.TWO, True, 0.75), rel=1e-14)


def test_degenerate_conditioning(ideal):
    with pytest.raises(DegenerateConditioning):
        gc.homodyne_mixture(ideal(0.0))
    with pytest.raises(DegenerateConditioning):
        gc.variance(ideal(0.0, scheme="two"))


# --- Wigner function ---------------------------------------------------------


@pytest.mark.parametrize("kind", ["ideal", "practical"])
def test_wigner_plane_integral(kind):
    make = ExperimentConfig.create if kind == "ideal" else ExperimentConfig.practical
    cfg = make(0.4)
    norm, _ = integrate.dblquad(
        lambda p, x: gc.wigner_single(cfg, x, p), -10, 10, -10, 10, epsabs=1e-10, epsrel=1e-10
    )
    assert abs(norm - 1.0) <= 1e-6


@pytest.mark.parametrize("kind", ["ideal", "practical"])
def test_wigner_marginal_is_homodyne_pdf(kind):
    make = ExperimentConfig.create if kind == "ideal" else ExperimentConfig.practical
    cfg = make(0.4)
    pdf = gc.homodyne_mixture(cfg, 0.0)
    for x in np.linspace(-3.0, 3.0, 41):
        marg, _ = integrate.quad(lambda p: gc.wigner_single(cfg, x, p), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)
        assert marg == pytest.approx(float(pdf.pdf(x)), abs=1e-9)


def test_wigner_p_marginal_is_rotated_pdf(ideal):
    cfg = ideal(0.4)
    pdf = gc.homodyne_mixture(cfg, math.pi / 2)
    for p in (0.0, 0.5, 1.7):
        marg, _ = integrate.quad(lambda x: gc.wigner_single(cfg, x, p), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)
        assert marg == pytest.approx(float(pdf.pdf(p)), abs=1e-9)


@pytest.mark.parametrize("lam", [0.4, 0.8])
@pytest.mark.parametrize("kind", ["ideal", "practical"])
def test_wigner_has_symmetric_negative_dips(lam, kind):
    make = ExperimentConfig.create if kind == "ideal" else ExperimentConfig.practical
    x = np.linspace(-4.0, 4.0, 401)
    w = gc.wigner_single(make(lam), x, 0.0)
    assert w.min() < 0.0
    assert w[np.argmin(w)] == pytest.approx(w[::-1][np.argmin(w)], abs=1e-15)
    assert abs(x[np.argmin(w)]) > 0.3


def test_wigner_two_mode_unsupported(ideal):
    with pytest.raises(ValueError):
        gc.wigner_mixture(ideal(0.4, scheme="two"))


# --- mean photon number ------------------------------------------------------


@pytest.mark.parametrize("lam", [0.01, 0.1, 0.4, 0.8, 0.95])
def test_mean_photon_matches_closed_form(lam):
    got = gc.mean_photon_single_ideal(ExperimentConfig.create(lam))
    assert got == pytest.approx(float(oracle_mean_photon(lam, 0.9)), rel=1e-10)


def test_mean_photon_exceeds_squeezed_vacuum(ideal):
    assert gc.mean_photon_single_ideal(ideal(0.4)) > 0.4**2 / (1 - 0.4**2)


def test_mean_photon_small_lambda_limit(ideal):
    # the limit is finite: successive decades agree to O(lambda^2)
    a = gc.mean_photon_single_ideal(ideal(1e-3))
    b = gc.mean_photon_single_ideal(ideal(1e-4))
    c = gc.mean_photon_single_ideal(ideal(1e-5))
    assert math.isfinite(a) and math.isfinite(b)
    assert abs(a - b) < 1e-5
    assert abs(b - c) < 1e-7
    assert b == pytest.approx(float(oracle_mean_photon(mp.mpf("1e-4"), 0.9)), rel=1e-9)


def test_mean_photon_rejects_imperfect(practical, ideal):
    with pytest.raises(NotIdeal):
        gc.mean_photon_single_ideal(practical(0.4))
    with pytest.raises(ValueError):
        gc.mean_photon_single_ideal(ideal(0.4, scheme="two"))
    with pytest.raises(DegenerateConditioning):
        gc.mean_photon_single_ideal(ideal(0.0))
