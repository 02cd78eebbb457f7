"""Exception types shared across the package."""


class HeliflowError(Exception):
    """Base class for all package errors."""


class DomainError(HeliflowError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class DomainViolationError(DomainError):
    """A radicand or positivity constraint fails on part of a requested interval.

    ``interval`` holds the offending (lo, hi) parameter range when known.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class EmptyDomainError(DomainError):
    """No admissible parameter interval exists for the requested family member."""


class SingularityError(HeliflowError, ArithmeticError):
    """The immersion degenerates (X_u x X_v = 0 or EG - F^2 <= 0)."""


class DegeneracyError(HeliflowError, ValueError):
    """A generating curve has zero speed, so the arc coordinate is not monotone."""
