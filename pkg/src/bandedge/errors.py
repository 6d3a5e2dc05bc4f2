"""Shared exception types."""


class BudgetError(RuntimeError):
    """A requested computation exceeds its configured resource budget."""


class NumericError(RuntimeError):
    """A numeric routine failed (non-convergence, residual check, ...)."""


class DiagramError(RuntimeError):
    """A quotient multigraph violates the expected degree pattern.

    Raised by the diagram classifier; on inputs that satisfy the path
    conditions this signals an enumeration bug, not bad user input.
    """
