"""Exception hierarchy shared by every module."""


class CipherError(Exception):
    """Base class for all errors raised by permcipher."""


class InvalidSizeError(CipherError, ValueError):
    """A key or dataset is too small (fewer than two records)."""


class DimensionError(CipherError, ValueError):
    """Operands have incompatible shapes."""


class InvalidDataError(CipherError, ValueError):
    """Input values are not usable (non-finite, non-bijective, ...)."""


class DomainError(CipherError, ValueError):
    """A distance distribution contains a nonpositive entry."""


class RangeError(CipherError, ValueError):
    """An aversion parameter lies outside the admissible range."""


class ParameterError(CipherError, ValueError):
    """A method parameter is out of range."""


class DegenerateInputError(CipherError, ValueError):
    """The input makes the operation undefined (e.g. zero variance)."""


class ParseError(CipherError, ValueError):
    """A file could not be parsed."""


class ValidationError(CipherError, ValueError):
    """A parsed document violates its schema."""


class CalibrationError(CipherError):
    """Key synthesis failed; ``report`` holds the best effort found."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
