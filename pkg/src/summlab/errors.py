"""Exception taxonomy shared by every module.

The kinds mirror how callers should react: structural errors are caller
bugs (shape/arity mismatches), domain errors are parameters outside the
mathematical domain of a formula, validity errors mean a bound formula
makes no claim at the given parameters, budget errors are explicit
refusals to enumerate past a configured size, and degenerate-input
errors flag inputs (like all-zero families) for which the requested
quantity is undefined.
"""


class SummLabError(Exception):
    """Base class for all summlab errors."""


class StructuralError(SummLabError):
    """Dimension, arity, or space-membership mismatch."""


class DomainError(SummLabError):
    """Parameter outside the mathematical domain of an operation."""


class ValidityError(SummLabError):
    """A tabulated bound makes no claim at the given parameters."""


class BudgetError(SummLabError):
    """An enumeration or tuple budget would be exceeded."""


class DegenerateInputError(SummLabError):
    """Input on which the requested quantity is undefined (e.g. zero vector)."""
