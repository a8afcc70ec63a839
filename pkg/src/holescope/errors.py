"""Exception types shared across holescope."""


class HolescopeError(Exception):
    """Base class for all library errors."""


class UsageError(HolescopeError, ValueError):
    """Invalid arguments, mixed spaces, malformed configs."""


class BitBudgetError(HolescopeError, ArithmeticError):
    """Exact rational arithmetic exceeded the configured bit budget."""


class ResourceCapError(HolescopeError):
    """A component or node cap was exceeded."""


class DerivativeUndefinedError(HolescopeError, ArithmeticError):
    """The orbit of 0 hit the critical point before the requested step."""

    def __init__(self, step, msg=None):
        self.step = step
        super().__init__(msg or f"orbit of 0 hits the critical point at step {step}")
