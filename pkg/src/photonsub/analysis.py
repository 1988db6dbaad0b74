"""Parameter scans, crossover search and the figure-data manifest."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import __version__
from . import gaussian_core as gc
from .config import ExperimentConfig, Scheme
from .dense_coding import SignalAlphabet, mi_scan
from .errors import DegenerateConditioning
from .sweeps import SweepResult, find_crossover

__all__ = [
    "SHOT_NOISE",
    "gain_db",
    "variance_scan",
    "pdet_scan",
    "mean_photon_scan",
    "pdf_table",
    "wigner_table",
    "variance_crossover",
    "oracle_cutoff",
    "FigureSpec",
    "FIGURES",
]

SHOT_NOISE = {Scheme.SINGLE: 0.5, Scheme.TWO: 1.0}

# largest cutoff the automatic choice will use; two-mode densities grow as cutoff**4
MAX_AUTO_CUTOFF = 48


def gain_db(value: float, scheme: Scheme) -> float:
    """Squeezing below shot noise in dB, ``-10 log10(value / shot_noise)``."""
    return -10.0 * math.log10(value / SHOT_NOISE[Scheme.parse(scheme)])


def _grid(grid: Iterable[float]) -> np.ndarray:
    g = np.asarray(list(grid), dtype=float)
    if np.any(g < 0.0) or np.any(g >= 1.0):
        raise ValueError("lambda grid must lie in [0, 1)")
    return g


def _meta(config: ExperimentConfig, quantity: str, **extra) -> dict:
    meta = {"quantity": quantity, "engine_version": __version__, **config.as_dict(), **extra}
    meta.pop("lambda", None)
    return meta


def _reference_loss(config: ExperimentConfig) -> dict:
    # the reference state passes the same lossy paths but no taps
    return {"apply_loss": True, "TL": config.setup.TL}


def variance_scan(config: ExperimentConfig, grid: Iterable[float], quad_phase: float = 0.0) -> SweepResult:
    """Heralded and reference variances over ``lambda`` with the heralded gain in dB.

    Points where no heralded state exists are written as NaN.
    """
    g = _grid(grid)
    ng, ref, db = [], [], []
    for lam in g:
        cfg = config.with_lambda(float(lam))
        ref.append(gc.reference_variance(float(lam), cfg.scheme, **_reference_loss(cfg)))
        try:
            v = gc.variance(cfg, quad_phase)
        except DegenerateConditioning:
            v = math.nan
        ng.append(v)
        db.append(gain_db(v, cfg.scheme) if math.isfinite(v) else math.nan)
    meta = _meta(config, "variance", phase=quad_phase)
    return SweepResult("lambda", g, {"value_ng": ng, "value_ref": ref, "gain_db": db}, meta)


def pdet_scan(config: ExperimentConfig, grid: Iterable[float]) -> SweepResult:
    g = _grid(grid)
    vals = [gc.detection_probability(config.with_lambda(float(lam))) for lam in g]
    return SweepResult("lambda", g, {"value_ng": vals}, _meta(config, "detection_probability"))


def oracle_cutoff(lam: float, scheme: Scheme | str) -> int:
    """Cutoff for Fock-space cross-checks at about 1e-7 accuracy.

    Heralding magnifies the truncated tail by the inverse success
    probability, so the bound is far tighter than the input state's own.
    """
    from .fock import FockCutoff, squeezed_tail, two_mode_tail

    scheme = Scheme.parse(scheme)
    tail = two_mode_tail if scheme is Scheme.TWO else squeezed_tail
    n = 24
    while n < MAX_AUTO_CUTOFF and tail(lam, n) > 1e-15:
        n += 2
    return FockCutoff(n, lam, scheme).n_max


def mean_photon_scan(config: ExperimentConfig, grid: Iterable[float], cutoff: int | None = None) -> SweepResult:
    """Mean photon number of the heralded mode ``A`` against the reference's.

    The ideal single-mode scheme has a closed form; every other case runs the
    Fock-space engine.
    """
    from . import fock

    g = _grid(grid)
    ng, ref = [], []
    closed = config.scheme is Scheme.SINGLE and config.is_ideal
    for lam in g:
        cfg = config.with_lambda(float(lam))
        nbar = lam * lam / (1.0 - lam * lam)
        ref.append(cfg.setup.TL * nbar)
        try:
            if closed:
                ng.append(gc.mean_photon_single_ideal(cfg))
            else:
                n = cutoff if cutoff is not None else oracle_cutoff(float(lam), cfg.scheme)
                rho, _ = fock.conditional_state(cfg, n)
                ng.append(fock.mean_photon(rho, 0))
        except DegenerateConditioning:
            ng.append(math.nan)
    engine = "closed_form" if closed else "fock"
    return SweepResult("lambda", g, {"value_ng": ng, "value_ref": ref}, _meta(config, "mean_photon", engine=engine))


def pdf_table(config: ExperimentConfig, x: Iterable[float], quad_phase: float = 0.0) -> SweepResult:
    """Homodyne density of the heralded state and of the reference.

    For the two-mode scheme this is the marginal of ``x_A - x_B``.
    """
    x = np.asarray(list(x), dtype=float)
    mix = gc.homodyne_mixture(config, quad_phase)
    ref = gc.reference_mixture(config.lam, config.scheme, **_reference_loss(config))
    if config.scheme is Scheme.TWO:
        mix, ref = mix.marginal("x"), ref.marginal("x")
    meta = _meta(config, "pdf", phase=quad_phase, lam=config.lam)
    return SweepResult("x", x, {"value_ng": mix.pdf(x), "value_ref": ref.pdf(x)}, meta)


def wigner_table(config: ExperimentConfig, x: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-major ``(x, p, W)`` columns over the grid ``x`` by ``p``."""
    X, P = np.meshgrid(x, p, indexing="ij")
    W = gc.wigner_single(config, X, P)
    return X.ravel(), P.ravel(), W.ravel()


def variance_crossover(config: ExperimentConfig, lo: float, hi: float, step: float = 1e-3) -> float | None:
    """``lambda`` where the heralded variance rises through the reference on ``[lo, hi]``."""

    def gap(lam: float) -> float:
        cfg = config.with_lambda(lam)
        return gc.variance(cfg) - gc.reference_variance(lam, cfg.scheme, **_reference_loss(cfg))

    return find_crossover(gap, lo, hi, step=step, rising=True)


@dataclass(frozen=True)
class FigureSpec:
    """Recipe for one figure's data file."""

    kind: str
    scheme: Scheme
    practical: bool
    lam: float | None = None
    grid: tuple[float, float, int] = (0.0, 0.95, 96)
    alpha: float | None = None
    extra: dict = field(default_factory=dict)

    def config(self, lam: float = 0.4) -> ExperimentConfig:
        if self.practical:
            return ExperimentConfig.practical(lam, scheme=self.scheme)
        return ExperimentConfig.create(lam, scheme=self.scheme)

    @property
    def columns(self) -> tuple[str, ...]:
        return {
            "pdf": ("x", "value_ng", "value_ref"),
            "variance": ("lambda", "value_ng", "value_ref", "gain_db"),
            "wigner": ("x", "p", "w"),
            "mean-photon": ("lambda", "value_ng", "value_ref"),
            "mi": ("lambda", "value_ng", "value_ref"),
        }[self.kind]


_S, _T = Scheme.SINGLE, Scheme.TWO
_PDF = (-5.0, 5.0, 201)
_W = (-4.0, 4.0, 161)
_L = (0.0, 0.95, 96)

FIGURES: dict[str, FigureSpec] = {
    "fig2": FigureSpec("pdf", _S, False, 0.4, _PDF),
    "fig3": FigureSpec("variance", _S, False, None, _L),
    "fig5": FigureSpec("wigner", _S, False, 0.4, _W),
    "fig6": FigureSpec("wigner", _S, False, 0.8, _W),
    "fig7": FigureSpec("pdf", _T, False, 0.4, _PDF),
    "fig8": FigureSpec("mean-photon", _S, False, None, (0.0, 0.9, 91)),
    "fig9": FigureSpec("variance", _T, False, None, _L),
    "fig10": FigureSpec("mi", _T, False, None, _L, 1.5),
    "fig11": FigureSpec("mi", _T, False, None, _L, 0.7),
    "fig12": FigureSpec("pdf", _S, True, 0.4, _PDF),
    "fig13": FigureSpec("variance", _S, True, None, _L),
    "fig14": FigureSpec("wigner", _S, True, 0.4, _W),
    "fig15": FigureSpec("wigner", _S, True, 0.8, _W),
    "fig16": FigureSpec("mi", _T, True, None, _L, 1.5),
    "fig17": FigureSpec("mi", _T, True, None, _L, 0.7),
}


def figure_data(fig_id: str):
    """Produce the data for a manifest entry.

    Returns:
        A :class:`SweepResult` or, for Wigner figures, ``(x, p, w)`` columns.

    Raises:
        KeyError: Unknown figure id.
    """
    spec = FIGURES[fig_id]
    lo, hi, n = spec.grid
    grid = np.linspace(lo, hi, n)
    if spec.kind == "pdf":
        return pdf_table(spec.config(spec.lam), grid)
    if spec.kind == "wigner":
        return wigner_table(spec.config(spec.lam), grid, grid)
    cfg = spec.config()
    if spec.kind == "variance":
        return variance_scan(cfg, grid)
    if spec.kind == "mean-photon":
        return mean_photon_scan(cfg, grid)
    return mi_scan(cfg, grid, SignalAlphabet(spec.alpha))
