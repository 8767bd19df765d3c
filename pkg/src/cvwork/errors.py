"""Exception hierarchy shared by every module."""


class ValidationError(ValueError):
    """A covariance matrix or state violates a structural invariant."""


class UnphysicalStateError(ValidationError):
    """A symplectic eigenvalue falls below the vacuum bound."""


class DomainError(ValueError):
    """A parameter lies outside the domain of the requested operation."""


class DimensionError(ValueError):
    """An operand has the wrong number of modes or vector length."""


class NumericError(ArithmeticError):
    """A numerical step failed for an input that passed validation."""
