"""Exception types raised by the doublewell package."""


class DoubleWellError(Exception):
    """Base class for all package errors."""


class DimensionError(DoubleWellError, ValueError):
    """Array arguments have incompatible shapes."""


class NotPositiveDefinite(DoubleWellError):
    """A matrix that must be positive definite is not (B^T B singular)."""


class PoleEvaluation(DoubleWellError):
    """The secular function was evaluated at (or too close to) one of its poles."""


class EmptyInterval(DoubleWellError):
    """A root search was requested on an empty interval."""


class ConvergenceError(DoubleWellError):
    """An iterative routine hit its iteration cap."""


class InvariantViolation(DoubleWellError):
    """A mathematically guaranteed property failed numerically."""
