"""Exception hierarchy shared by every module."""


class QMRError(Exception):
    """Base class for all package errors."""


class DomainError(QMRError, ValueError):
    """An argument lies outside the supported range of an operation."""


class SingularityError(DomainError):
    """Evaluation at a genuine singularity (Hankel functions at the origin)."""


class ConfigurationError(QMRError, ValueError):
    """Physically inadmissible or malformed configuration."""


class NumericalError(QMRError, ArithmeticError):
    """A computation could not be carried out to the required accuracy."""


class NearSingularError(NumericalError):
    """The rescaled mode determinant is below the resolution threshold."""


class ResolutionError(NumericalError):
    """A quadrature rule is too coarse for the requested mode order."""


class UnsupportedModeError(DomainError):
    """The analysis only covers incident waves made of the m = n mode."""
