"""Exception types raised by the simulator."""


class DegenerateConditioning(ValueError):
    """The heralding event has zero probability, so no conditional state exists."""


class NotIdeal(ValueError):
    """A closed form that only exists for the lossless, perfect-detector setup was requested."""


class InvalidDistribution(ValueError):
    """A probability vector or stochastic matrix fails normalization."""


class CutoffTooSmall(ValueError):
    """The Fock truncation discards more probability mass than allowed."""
