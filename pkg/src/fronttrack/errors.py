class FrontTrackError(Exception):
    """Base class for solver errors."""


class InvalidFluxError(FrontTrackError, ValueError):
    """A flux violates strict monotonicity on the range where it is used."""


class OutOfRangeError(FrontTrackError, ValueError):
    """A state or flux value left the working range of a flux."""


class NonTerminationError(FrontTrackError, RuntimeError):
    """The event loop exceeded its safety cap."""


class ConfigurationError(FrontTrackError, ValueError):
    """Invalid solver or experiment configuration (e.g. a CFL violation)."""
