"""Truncated Fock-space engine used to verify the closed forms independently."""

from .experiments import conditional_state, dakna_conditional_state, trace_distance, two_mode_input, vacuum_overlap
from .observables import (
    bell_pdf,
    bell_variance,
    channel_matrix_oracle,
    hermite_functions,
    mean_photon,
    quadrant_probabilities,
    quadrature_pdf,
    quadrature_variance,
    wigner,
)
from .operations import (
    DiagonalPOVM,
    annihilation,
    beam_splitter,
    detect_on,
    displace,
    loss_channel,
    on_off_povm,
    quadrature_operator,
    quadrature_square,
    sector_unitary,
    tap_coefficients,
)
from .states import (
    DensityOperator,
    FockCutoff,
    FockStateVector,
    number_state,
    squeezed_amplitudes,
    squeezed_tail,
    squeezed_vacuum_state,
    two_mode_tail,
    vacuum_state,
)

__all__ = [
    "DensityOperator",
    "DiagonalPOVM",
    "FockCutoff",
    "FockStateVector",
    "annihilation",
    "beam_splitter",
    "bell_pdf",
    "bell_variance",
    "channel_matrix_oracle",
    "conditional_state",
    "dakna_conditional_state",
    "detect_on",
    "displace",
    "hermite_functions",
    "loss_channel",
    "mean_photon",
    "number_state",
    "on_off_povm",
    "quadrant_probabilities",
    "quadrature_operator",
    "quadrature_pdf",
    "quadrature_square",
    "quadrature_variance",
    "sector_unitary",
    "squeezed_amplitudes",
    "squeezed_tail",
    "squeezed_vacuum_state",
    "tap_coefficients",
    "trace_distance",
    "two_mode_input",
    "two_mode_tail",
    "vacuum_overlap",
    "vacuum_state",
    "wigner",
]
