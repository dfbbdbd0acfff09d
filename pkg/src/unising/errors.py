class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured size budget."""


class InvariantViolation(RuntimeError):
    """Two routes that must agree did not (e.g. a shortcut and a full scan)."""
