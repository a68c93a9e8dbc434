"""Exception hierarchy shared by the library and the command-line tools."""


class QHomologyError(ValueError):
    """Base class for every error raised by qhomology."""


class InvalidHeightError(QHomologyError):
    def __init__(self, h):
        super().__init__(f"height must be an integer >= 2, got {h!r}")
        self.h = h


class SingularScalarError(QHomologyError, ZeroDivisionError):
    """Division by the zero scalar."""


class QFactorialError(QHomologyError, ZeroDivisionError):
    """Divided power requested for an exponent where [n]! vanishes."""


class AmbientMismatchError(QHomologyError):
    pass


class ContainmentError(QHomologyError):
    pass


class NotNilpotentError(QHomologyError):
    """Raised when N^power != 0.

    ``index`` is the smallest j with N^j = 0, or None when N is not nilpotent.
    """

    def __init__(self, power, index=None, what="matrix"):
        detail = f"nilpotent of index {index}" if index is not None else "not nilpotent"
        super().__init__(f"{what} is not {power}-nilpotent: smallest failing power is {power} ({detail})")
        self.power = power
        self.index = index


class InvarianceViolationError(QHomologyError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class QCommutationError(QHomologyError):
    pass


class ModelConstructionError(QHomologyError):
    pass


class ExpectationError(QHomologyError):
    """A computed invariant disagrees with its proven value."""


class SchemaError(QHomologyError):
    pass


class SingularMatrixError(QHomologyError):
    pass
