"""Exception types raised across the library."""


class TomographyError(Exception):
    """Base class for failures specific to this library."""


class ZeroVector(TomographyError, ValueError):
    """Raised when a vector is too close to zero to normalize."""


class DimensionMismatch(TomographyError, ValueError):
    """Raised when operands live in different Hilbert space dimensions."""


class InvalidDistribution(TomographyError, ValueError):
    """Raised when a probability vector has negative entries or wrong sum."""


class DegenerateIterate(TomographyError, ArithmeticError):
    """Raised when an optimizer update collapses to the zero vector."""


class EmptyData(TomographyError, ValueError):
    """Raised when a likelihood is requested with no measurement records."""


class EmptyInput(TomographyError, ValueError):
    """Raised when summary statistics are requested for an empty sample."""


class ConfigInvalid(TomographyError, ValueError):
    """Raised when an experiment configuration violates its constraints."""


class IoFailure(TomographyError, OSError):
    """Raised when a report cannot be written to its target path."""
