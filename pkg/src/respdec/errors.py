"""Exception types shared across the package.

Parameter misuse (bad ratio, bad depth, bad threshold) raises plain
ValueError; the classes below cover data-shaped failures that callers
may want to dispatch on, e.g. the CLI exit-code mapping.
"""


class RespdecError(Exception):
    """Base class for all package-specific errors."""


class MatrixFormatError(RespdecError):
    """CSV input is structurally or numerically invalid.

    Carries optional 1-based ``line`` / ``column`` attributes pointing at
    the offending cell.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class DegenerateDataError(RespdecError):
    """The data cannot support the requested estimation (all-null row or
    column, empty matrix, and similar)."""


class EmptyMaskError(DegenerateDataError):
    """A closeness measure was requested over zero observed cells."""


class IncompleteMatrixError(RespdecError):
    """An operation that needs a fully observed matrix received nulls."""


class DivergenceError(RespdecError):
    """Gradient descent produced a non-finite or increasing objective."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
