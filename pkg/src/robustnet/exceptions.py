"""Exception hierarchy shared by every module."""


class RobustNetError(Exception):
    """Base class for all library errors."""


class FormatError(RobustNetError, ValueError):
    """Malformed instance, solution or DIMACS text."""


class InvalidInstanceError(RobustNetError, ValueError):
    """An instance violates one of its structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid instance")


class InfeasibleError(RobustNetError):
    """No feasible solution exists (no s-t path, disconnected graph, ...)."""


class SizeLimitError(RobustNetError):
    """A solver or generator refused to run because a size cap was exceeded."""

    def __init__(self, message, cap=None):
        self.cap = cap
        super().__init__(message)
