"""Exception hierarchy shared by all modules."""


class FiberCrystError(Exception):
    """Base class for all package errors."""


class DomainError(FiberCrystError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(FiberCrystError, OverflowError):
    """An intermediate quantity would overflow double precision."""


class BracketError(FiberCrystError, ValueError):
    """A root bracket does not straddle a sign change."""


class AccuracyError(FiberCrystError, ArithmeticError):
    """A quadrature or fit failed to reach the requested accuracy."""


class ConvergenceError(FiberCrystError):
    """An iteration hit its limit.  Carries the last iterate when available."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class StiffnessError(FiberCrystError, ArithmeticError):
    """An adaptive integrator underflowed its step size."""


class ConfigError(FiberCrystError, ValueError):
    """A scenario configuration is invalid.  Carries all errors, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
