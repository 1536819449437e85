"""Exception types shared across the package."""


class SircapError(Exception):
    """Base class for all package errors."""


class InvalidParams(SircapError, ValueError):
    """Problem instance violates a domain invariant."""


class ScheduleError(SircapError, ValueError):
    """Control schedule has gaps, overlaps or out-of-range values."""


class DomainError(SircapError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ArcOverrun(SircapError, ValueError):
    """A cap-holding arc was extended past its feasibility limit."""


class NumericalFailure(SircapError, RuntimeError):
    """Integration or iteration left the trusted region."""


class BracketError(SircapError, RuntimeError):
    """A root bracket that theory guarantees could not be established."""


class UndefinedAtKink(SircapError, ValueError):
    """Derivative requested exactly at a kink of a piecewise function."""
