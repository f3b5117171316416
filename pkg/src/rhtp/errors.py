"""Exception hierarchy shared by every rhtp module."""


class RHTPError(Exception):
    """Base class for all library errors."""


class ArgumentError(RHTPError, ValueError):
    """An argument is outside the domain an operation accepts."""


class SingularityError(RHTPError, ArithmeticError):
    """A restricted column submatrix is (numerically) rank deficient."""


class BudgetError(RHTPError):
    """An exact combinatorial computation would exceed its budget."""


class InvalidRegularizerError(ArgumentError):
    """Regularizer parameters violate the curvature condition gamma * g'' < 1."""


class InternalError(RHTPError, RuntimeError):
    """A numerical routine failed in a way valid inputs should never cause."""


class InapplicableError(RHTPError):
    """A theoretical bound was requested outside the regime where it holds."""


class PreconditionError(RHTPError):
    """The hypotheses of a property check do not hold; the check would be vacuous."""


class ConfigError(RHTPError):
    """An experiment configuration is malformed or unreadable."""
