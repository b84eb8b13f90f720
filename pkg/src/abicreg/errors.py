"""Exception types shared across the package."""

__all__ = [
    "AbicregError",
    "DimensionError",
    "DomainError",
    "FactorizationError",
    "SingularMatrixError",
    "DegenerateProblemError",
    "EvaluationError",
    "RankDeficiencyWarning",
]


class AbicregError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(AbicregError, ValueError):
    """Array shapes are inconsistent. The message names the offending field."""


class DomainError(AbicregError, ValueError):
    """A scalar parameter is outside its valid domain (e.g. kappa < 0)."""


class FactorizationError(AbicregError, ArithmeticError):
    """A matrix required to be symmetric positive definite is not."""


class SingularMatrixError(FactorizationError):
    """A normal matrix is numerically singular.

    Carries the condition estimate that triggered the failure in
    ``condition``, when one was computed.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DegenerateProblemError(AbicregError, ValueError):
    """The data make an objective undefined (e.g. y equals A mu exactly)."""


class EvaluationError(AbicregError, ArithmeticError):
    """An objective could not be evaluated over most of the search grid."""


class RankDeficiencyWarning(UserWarning):
    """The design matrix is numerically rank deficient."""
