"""Exceptions raised by the NUFFT library and its analysis tools."""


class NufftError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(NufftError, ValueError):
    """A sizing or kernel parameter is outside its allowed domain."""


class InvalidInputError(NufftError, ValueError):
    """Input arrays have inconsistent lengths or non-finite entries."""


class DomainError(NufftError, ValueError):
    """A formula was evaluated outside the range where it is defined."""


class UnsupportedSizeError(NufftError):
    """FFT length is not 5-smooth."""


class FrequencyTooLargeError(NufftError):
    """Quadrature order needed for this frequency exceeds the cap."""


class TruncationError(NufftError):
    """A truncated series or basis is too short for the requested accuracy."""


class ConsistencyError(NufftError):
    """An internal consistency check failed (should not happen for ES/KB)."""


class NumericalInconsistencyError(NufftError):
    """Two independent computation routes disagree."""


class ConvergenceError(NufftError):
    """An iteration failed to converge."""


class DataFileError(NufftError):
    """Malformed CSV input.

    Args:
        path: File that failed to parse
        line: 1-based line number of the offending row (0 if unknown)
        message: What was wrong with it
    """

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        self.message = message
        where = f"{path}:{line}" if line else path
        super().__init__(f"{where}: {message}")
