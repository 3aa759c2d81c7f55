"""Exception types shared across the package."""


class ChirpGlottalError(Exception):
    """Base class for all package errors."""


class InvalidArgument(ChirpGlottalError, ValueError):
    pass


class OutOfRange(ChirpGlottalError, IndexError):
    pass


class DegenerateInput(ChirpGlottalError, ValueError):
    pass


class NumericalFailure(ChirpGlottalError, ArithmeticError):
    """Raised when a numerical routine cannot reach its accuracy target.

    ``residual_max`` carries the offending residual when one was measured.
    """

    def __init__(self, message, residual_max=None):
        super().__init__(message)
        self.residual_max = residual_max


class FormatError(ChirpGlottalError, ValueError):
    """Malformed input file. ``offset`` is a byte offset or a 1-based line number."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset
