"""Exception hierarchy shared by every trigsvm module."""

from __future__ import annotations


class TrigSVMError(Exception):
    """Base class for all errors raised by trigsvm."""


class InvalidParameterError(TrigSVMError, ValueError):
    pass


class ShapeError(TrigSVMError, ValueError):
    pass


class EmptyInputError(TrigSVMError, ValueError):
    pass


class DataError(TrigSVMError, ValueError):
    """Non-finite or otherwise unusable feature/target values."""


class DegenerateDataError(TrigSVMError, ValueError):
    """Training data that cannot define the problem (e.g. a single class)."""


class LabelError(TrigSVMError, ValueError):
    pass


class ParseError(TrigSVMError, ValueError):
    def __init__(self, message: str, row: int | None = None, column: int | str | None = None):
        if row is not None or column is not None:
            message = f"{message} (row {row}, column {column})"
        super().__init__(message)
        self.row = row
        self.column = column


class FormatError(TrigSVMError, ValueError):
    """Model file carries an unknown or missing format version."""


class ProtocolError(TrigSVMError, ValueError):
    """Resampling protocol cannot be honoured (e.g. class smaller than fold count)."""


class NumericalFailureError(TrigSVMError, ArithmeticError):
    pass


class RegularizationError(TrigSVMError, ArithmeticError):
    """No diagonal shift in the jitter schedule made the matrix positive definite."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class ConvergenceError(TrigSVMError, RuntimeError):
    """The dual solver stopped before meeting its KKT tolerance."""

    def __init__(self, message: str, violation: float, iterations: int):
        super().__init__(message)
        self.violation = violation
        self.iterations = iterations
