"""Exception types raised by the simulator and learner."""
from __future__ import annotations


class RisDrlError(Exception):
    """Base class for all risdrl errors."""


class DimensionError(RisDrlError, ValueError):
    """Array sizes do not agree, or a dimension is zero."""


class DomainError(RisDrlError, ValueError):
    """Argument outside the domain of a formula (e.g. non-positive distance)."""


class SingularChannelError(RisDrlError, ArithmeticError):
    """Stacked channel matrix is rank deficient, plain ZF is undefined."""


class InfeasibleAssociationError(RisDrlError, ValueError):
    """No association can satisfy the per-BS service constraint."""


class ProtocolError(RisDrlError, RuntimeError):
    """Environment used out of order (e.g. step after the episode ended)."""


class BudgetExceededError(RisDrlError, ValueError):
    """Exhaustive search would need more evaluations than allowed."""

    def __init__(self, required: float, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"Exhaustive search needs {required:.0f} evaluations, budget is {budget}"
        )


class NumericalError(RisDrlError, ArithmeticError):
    """A network produced non-finite values."""
