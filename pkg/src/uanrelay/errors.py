"""Exception types shared across the package."""


class UanRelayError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(UanRelayError, ValueError):
    """Raised when an input value or a model violates a documented invariant."""


class ModelMismatchError(ValidationError):
    """Raised when a fitted model is used with a link spec it was not fitted for."""


class FitRankError(UanRelayError, ValueError):
    """Raised when a least-squares problem is degenerate (rank deficient)."""


class BoundaryMinimumError(UanRelayError, RuntimeError):
    """Raised when the frequency search ends on the search window boundary."""


class BandTruncationError(UanRelayError, RuntimeError):
    """Raised when a 3 dB band edge is not bracketed inside the search window."""


class BracketError(UanRelayError, RuntimeError):
    """Raised when a root or transition is not bracketed by the supplied grid."""


class QuadratureError(UanRelayError, RuntimeError):
    """Raised when adaptive quadrature fails to reach the requested tolerance."""
