"""Exception types shared across the package."""

__all__ = [
    "DomainError",
    "ConvergenceError",
    "DimensionMismatchError",
    "TruncationError",
    "DegenerateReadingError",
    "InconsistentDataError",
]


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A series or quadrature failed to reach the requested tolerance."""


class DimensionMismatchError(ValueError):
    """Operands live on different truncated spaces (dim or k differ)."""


class TruncationError(RuntimeError):
    """Requested truncation dimension cannot meet the declared tail bound."""


class DegenerateReadingError(ValueError):
    """Interference readings carry no phase information (P3 = 0)."""


class InconsistentDataError(ValueError):
    """Input data violate the model assumed by the estimator."""
