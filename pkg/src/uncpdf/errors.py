"""Exception types raised across the package."""


class UncertaintyError(Exception):
    """Base class for all package errors."""


class NotHermitian(UncertaintyError, ValueError):
    pass


class DimMismatch(UncertaintyError, ValueError):
    pass


class DimTooSmall(UncertaintyError, ValueError):
    pass


class DegenerateSpectrum(UncertaintyError, ValueError):
    """Raised when a density needs distinct eigenvalues (or a nonzero Bloch vector)."""


class SingularGram(UncertaintyError, ValueError):
    """Raised when an operation needs a full-rank Gram matrix."""


class NonQubit(UncertaintyError, ValueError):
    pass


class NonMonotoneEdges(UncertaintyError, ValueError):
    pass


class WrongVariant(UncertaintyError, TypeError):
    pass


class UnsupportedDimension(UncertaintyError, ValueError):
    pass
