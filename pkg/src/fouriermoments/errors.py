"""Shared exception types.

Exit-code mapping used by the CLI: ParameterError -> 2, BudgetError -> 3,
CrossCheckError -> 4.
"""


class ParameterError(ValueError):
    """Invalid argument or violated precondition (e.g. crossing partition)."""


class BudgetError(RuntimeError):
    """A computation was refused because its estimated cost exceeds the budget."""

    def __init__(self, message: str, estimated_ops: int, budget: int):
        super().__init__(message)
        self.estimated_ops = estimated_ops
        self.budget = budget


class ValidationError(ValueError):
    """Numerical input failed a structural validation (e.g. not Hadamard)."""


class CrossCheckError(RuntimeError):
    """Two exact methods disagreed on a value that must be identical."""
