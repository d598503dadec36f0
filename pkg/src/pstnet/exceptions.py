"""Exception hierarchy shared by every pstnet module."""


class PSTError(Exception):
    """Base class for all pstnet errors."""


class InvalidGraphError(PSTError, ValueError):
    """Malformed graph description (bad endpoints, loops, duplicate edges)."""


class InvalidSizeError(PSTError, ValueError):
    pass


class UnsupportedError(PSTError, ValueError):
    """Requested variant is outside what a closed form or builder supports."""


class UnreachableError(PSTError, ValueError):
    pass


class NotInFamilyError(PSTError, ValueError):
    """Graph does not admit a valid column partition."""


class UndefinedFieldsError(PSTError, ValueError):
    pass


class OracleSizeError(PSTError, ValueError):
    """Full Hilbert-space construction requested above the configured qubit limit."""


class ValidationError(PSTError, ValueError):
    pass


class DegenerateSpectrumError(PSTError, ValueError):
    pass


class NumericalError(PSTError, ArithmeticError):
    pass
