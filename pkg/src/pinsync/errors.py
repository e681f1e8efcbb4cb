"""Exception types shared across the package."""


class PinsyncError(Exception):
    """Base class for all package errors."""


class DomainError(PinsyncError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(PinsyncError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    Attributes
    ----------
    estimate : float
        Last estimate produced before giving up.
    error : float
        Error bound attached to ``estimate``.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class UnsupportedCaseError(PinsyncError, ValueError):
    """The requested combination of options has no implementation."""


class ParseError(PinsyncError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
