"""Physical parameterization of one photon-subtraction experiment.

Quadratures follow the convention ``x = (a + a^dagger) / sqrt(2)`` so the
vacuum has variance 1/2. The squeezing strength is carried as
``lam = tanh(r)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

__all__ = [
    "Scheme",
    "SqueezingSpec",
    "DetectorModel",
    "OpticalSetup",
    "ExperimentConfig",
    "DEFAULT_TAP_TRANSMITTANCE",
    "PRACTICAL_DEFAULTS",
]

DEFAULT_TAP_TRANSMITTANCE = 0.9

#: Imperfection levels used for the "practical" figures: 25 % path loss,
#: 60 % detector efficiency and 1e-3 dark counts per gate.
PRACTICAL_DEFAULTS = {"TL": 0.75, "eta": 0.6, "nu": 1e-3}


class Scheme(enum.Enum):
    SINGLE = "single"
    TWO = "two"

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected 'single' or 'two'") from None


@dataclass(frozen=True)
class SqueezingSpec:
    """Squeezing of the input vacuum, stored as ``lam = tanh(r)``."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not (0.0 <= lam < 1.0) or math.isnan(lam):
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def r(self) -> float:
        return math.atanh(self.lam)


@dataclass(frozen=True)
class DetectorModel:
    """On-off detector with efficiency ``efficiency`` and mean dark count ``dark_mean``."""

    efficiency: float = 1.0
    dark_mean: float = 0.0

    def __post_init__(self):
        eta, nu = float(self.efficiency), float(self.dark_mean)
        if not (0.0 < eta <= 1.0):
            raise ValueError(f"detector efficiency must lie in (0, 1], got {self.efficiency!r}")
        if not (nu >= 0.0) or math.isinf(nu):
            raise ValueError(f"dark count mean must be finite and >= 0, got {self.dark_mean!r}")
        object.__setattr__(self, "efficiency", eta)
        object.__setattr__(self, "dark_mean", nu)

    @property
    def is_ideal(self) -> bool:
        return self.efficiency == 1.0 and self.dark_mean == 0.0


@dataclass(frozen=True)
class OpticalSetup:
    """Beam-splitter transmittances of the interferometer.

    ``tap_transmittance`` is the high-transmittance tap feeding each
    detector, ``path_transmittance`` models linear loss in each arm. The
    splitting and recombining beam splitters are always balanced.
    """

    tap_transmittance: float = DEFAULT_TAP_TRANSMITTANCE
    path_transmittance: float = 1.0
    interferometer_split: float = field(default=0.5, init=False)

    def __post_init__(self):
        t, tl = float(self.tap_transmittance), float(self.path_transmittance)
        if not (0.0 < t < 1.0):
            raise ValueError(f"tap transmittance T must lie in (0, 1), got {self.tap_transmittance!r}")
        if not (0.0 < tl <= 1.0):
            raise ValueError(f"path transmittance T_L must lie in (0, 1], got {self.path_transmittance!r}")
        object.__setattr__(self, "tap_transmittance", t)
        object.__setattr__(self, "path_transmittance", tl)

    @property
    def T(self) -> float:
        return self.tap_transmittance

    @property
    def R(self) -> float:
        return 1.0 - self.tap_transmittance

    @property
    def TL(self) -> float:
        return self.path_transmittance

    @property
    def RL(self) -> float:
        return 1.0 - self.path_transmittance

    @property
    def tap_angle(self) -> float:
        """Beam-splitter angle with ``tan(theta) = sqrt(R / T)``."""
        return math.atan(math.sqrt(self.R / self.T))

    @property
    def loss_angle(self) -> float:
        return math.atan(math.sqrt(self.RL / self.TL))

    @property
    def split_angle(self) -> float:
        tau = self.interferometer_split
        return math.atan(math.sqrt((1.0 - tau) / tau))


@dataclass(frozen=True)
class ExperimentConfig:
    squeezing: SqueezingSpec
    setup: OpticalSetup = OpticalSetup()
    detector: DetectorModel = DetectorModel()
    scheme: Scheme = Scheme.SINGLE

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))

    @classmethod
    def create(
        cls,
        lam: float,
        *,
        T: float = DEFAULT_TAP_TRANSMITTANCE,
        TL: float = 1.0,
        eta: float = 1.0,
        nu: float = 0.0,
        scheme: Scheme | str = Scheme.SINGLE,
    ) -> "ExperimentConfig":
        """Build a config from flat parameters (``TL``, ``eta``, ``nu`` default to ideal)."""
        return cls(
            squeezing=SqueezingSpec(lam),
            setup=OpticalSetup(tap_transmittance=T, path_transmittance=TL),
            detector=DetectorModel(efficiency=eta, dark_mean=nu),
            scheme=Scheme.parse(scheme),
        )

    @classmethod
    def practical(cls, lam: float, *, T: float = DEFAULT_TAP_TRANSMITTANCE, scheme="single"):
        return cls.create(lam, T=T, scheme=scheme, **PRACTICAL_DEFAULTS)

    @property
    def lam(self) -> float:
        return self.squeezing.lam

    @property
    def is_ideal(self) -> bool:
        return self.setup.path_transmittance == 1.0 and self.detector.is_ideal

    def with_lambda(self, lam: float) -> "ExperimentConfig":
        return replace(self, squeezing=SqueezingSpec(lam))

    def with_scheme(self, scheme: Scheme | str) -> "ExperimentConfig":
        return replace(self, scheme=Scheme.parse(scheme))

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "T": self.setup.T,
            "TL": self.setup.TL,
            "eta": self.detector.efficiency,
            "nu": self.detector.dark_mean,
            "tau": self.setup.interferometer_split,
            "scheme": self.scheme.value,
        }
