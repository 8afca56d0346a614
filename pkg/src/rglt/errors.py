"""Exception hierarchy shared by every module of the package."""


class GLTError(Exception):
    """Base class for all errors raised by :mod:`rglt`."""


class ArgumentError(GLTError, ValueError):
    """Invalid sizes, parameters or shapes."""


class IndexRangeError(GLTError, IndexError):
    """Multi-index or row/column index outside its admissible range."""


class DomainError(GLTError, ValueError):
    """A function was evaluated where it is undefined (division by zero, singular node...)."""


class NumericalError(GLTError, ArithmeticError):
    """A numerical kernel failed (non-convergence, singular factorization)."""


class DefinitenessError(NumericalError):
    """Cholesky factorization hit a non-positive pivot."""


class InvariantViolation(GLTError, AssertionError):
    """A structural identity that should hold exactly (or to tolerance) did not."""


class ParseError(ArgumentError):
    """Syntax error in a coefficient expression.

    Attributes
    ----------
    offset : int
        0-based byte offset of the offending token.
    expected : tuple of str
        Tokens that would have been accepted at ``offset``.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)
