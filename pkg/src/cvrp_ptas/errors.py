"""Exception types shared across the package."""


class CvrpError(Exception):
    """Base class for all package errors."""


class ParseError(CvrpError):
    """The instance document could not be read."""


class ValidationError(CvrpError):
    """An instance or solution violates a structural invariant."""

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class BudgetExceeded(CvrpError):
    """Input is beyond what an exact solver is allowed to attempt."""


class CapacityPlanningError(BudgetExceeded):
    """A host graph is too wide for the exact dynamic program."""


class ContractViolation(CvrpError):
    """An embedding or pipeline guarantee was broken."""
