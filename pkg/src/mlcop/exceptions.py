"""Exception types raised by mlcop."""


class MlcopError(Exception):
    """Base class for all package errors."""


class InputError(MlcopError, ValueError):
    """Malformed input: empty sample, NaN, ragged rows, bad token."""


class DomainError(MlcopError, ValueError):
    """Argument outside the domain of a function (e.g. an unbounded quantile at 0 or 1)."""


class DegenerateDataError(MlcopError, ValueError):
    """A column has zero empirical score variance, so standardized statistics are undefined."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class NumericalError(MlcopError, RuntimeError):
    """A numerical routine (quadrature, root finding) failed to converge."""
