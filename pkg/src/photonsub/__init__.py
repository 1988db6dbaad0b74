"""Closed-form and Fock-space models of photon-subtracted squeezed vacua."""

__version__ = "0.1.0"

from .config import DetectorModel, ExperimentConfig, OpticalSetup, Scheme, SqueezingSpec
from .errors import CutoffTooSmall, DegenerateConditioning, InvalidDistribution, NotIdeal

__all__ = [
    "__version__",
    "CutoffTooSmall",
    "DegenerateConditioning",
    "DetectorModel",
    "ExperimentConfig",
    "InvalidDistribution",
    "NotIdeal",
    "OpticalSetup",
    "Scheme",
    "SqueezingSpec",
]
