"""Exception hierarchy shared by every module."""

from __future__ import annotations


class FinitopError(Exception):
    """Base class for all library errors."""


class ShapeError(FinitopError):
    pass


class CycleError(FinitopError):
    """A relation fails antisymmetry after transitive closure."""


class ContinuityError(FinitopError):
    """An assignment is not order-preserving."""


class ImageError(FinitopError):
    pass


class SubspaceError(FinitopError):
    pass


class DomainMismatch(FinitopError):
    pass


class EmptyDomain(FinitopError):
    pass


class MissingWitness(FinitopError):
    pass


class SquareInvalid(FinitopError):
    pass


class ComponentInvalid(FinitopError):
    pass


class NonPrimeModulus(FinitopError):
    pass


class OrderMissing(FinitopError):
    pass


class ParseError(FinitopError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class SearchBudgetExceeded(FinitopError):
    """Raised when an exact search would exceed its configured budget.

    ``lower`` and ``upper`` bracket the true value; neither is a guess.
    """

    def __init__(self, message: str, lower: int = 0, upper: int | None = None):
        super().__init__(f"{message} (bounds: {lower}..{upper if upper is not None else 'inf'})")
        self.lower = lower
        self.upper = upper
