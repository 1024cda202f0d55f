"""Exception hierarchy shared across the package."""


class MemcostError(Exception):
    """Base class for all package errors."""


class ValidationError(MemcostError):
    """An input object violates one of its invariants."""


class CapacityError(MemcostError):
    """System too large for the exact engine; use the Monte Carlo path."""


class ModelError(MemcostError):
    """The Markov model is degenerate (absorbing set unreachable, singular solve)."""


class DomainError(MemcostError):
    """A parameter is outside the mathematical domain of an operation."""


class DegenerateThreshold(MemcostError):
    """The two cost curves do not cross at a finite nonnegative replenishment cost."""


class EstimateError(MemcostError):
    """Monte Carlo estimation produced no usable trials."""
