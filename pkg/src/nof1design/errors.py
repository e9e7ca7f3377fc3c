"""Exception types shared across the package.

Exit-code / HTTP mapping (see cli.py and service.py):
ParameterError -> exit 2 / HTTP 400, EstimabilityError -> exit 3 / HTTP 422,
an empty search result everywhere -> exit 4 / HTTP 422.
"""


class Nof1DesignError(Exception):
    """Base class for all package errors."""


class ParameterError(Nof1DesignError, ValueError):
    """A parameter is outside its domain. ``field`` names the offender."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SequenceFileError(ParameterError):
    """Malformed manual-sequence text. ``line`` is 1-based."""

    def __init__(self, message, line):
        super().__init__(message, field="sequences")
        self.line = line


class EstimabilityError(Nof1DesignError):
    """The summed information matrix is singular for some coordinate."""

    def __init__(self, message, coordinate="treatment"):
        super().__init__(message)
        self.coordinate = coordinate


class UnsupportedModelError(Nof1DesignError):
    """Operation undefined for the requested model form."""
