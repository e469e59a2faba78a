"""Shared exception types."""

from __future__ import annotations


class FormulaSyntaxError(ValueError):
    """Raised by the formula parser; carries the character offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class BudgetExceededError(RuntimeError):
    """An exhaustive computation ran past its node or wall-clock budget."""


class MalformedDemonstrationError(ValueError):
    """A demonstration's label contradicts the target's verdict on its trajectory."""


class InfeasibleLengthError(ValueError):
    """The requested trajectory length cannot support the requested verdicts."""


class NoProgressError(RuntimeError):
    """No feasible demonstration eliminates any remaining candidate."""


class UncoverableError(RuntimeError):
    """The demo pool cannot eliminate some required hypothesis."""


class IterationCapError(RuntimeError):
    """A teaching session exceeded its iteration cap without converging."""


class InfeasibleInstanceError(RuntimeError):
    """No trajectory of the requested length satisfies the target constraint."""
