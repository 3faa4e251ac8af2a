"""Exception types shared across the package."""


class SemistatError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SemistatError, ValueError):
    """A parameter or argument lies outside the supported domain."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a non-integrable singularity."""


class GridError(SemistatError, ValueError):
    """Input observations are not on an equidistant time grid."""


class LengthError(SemistatError, ValueError):
    """A path or array is too short for the requested operation."""


class DegenerateError(SemistatError, ValueError):
    """A statistic is degenerate (for example zero variation)."""


class CholeskyError(SemistatError, ArithmeticError):
    """Covariance factorization failed even after diagonal regularization."""
