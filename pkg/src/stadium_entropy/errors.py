"""Exception types shared across the package."""

from __future__ import annotations


class StadiumError(Exception):
    """Base class for all package errors."""


class DomainError(StadiumError, ValueError):
    """An argument lies outside the domain of an operation."""


class GeometryError(StadiumError, ValueError):
    """A point that should lie on the table boundary does not."""


class Singular(StadiumError):
    """The billiard map is undefined here (grazing collision or corner hit)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SingularAtStep(Singular):
    """A trajectory reached the singular set at iterate ``index``."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"singular at step {index}: {reason}")
        self.index = index
        self.reason = reason


class WordError(StadiumError, ValueError):
    """A symbolic word violates the grammar or a structural requirement."""


class BlockTooLong(WordError):
    def __init__(self, index: int, length: int, limit: int):
        super().__init__(
            f"segment block starting at index {index} has length {length} > {limit}"
        )
        self.index = index


class BoundaryNotZero(WordError):
    pass


class StructuralError(StadiumError, ValueError):
    """A graph-theoretic precondition (e.g. a rome) fails."""


class NumericError(StadiumError, ArithmeticError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message: str, residual: float, best=None):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
        self.best = best
