"""Exception types shared across the package."""


class SylowlabError(Exception):
    """Base class for all errors raised by sylowlab."""


class ModulusMismatch(SylowlabError, ValueError):
    pass


class DomainError(SylowlabError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class BudgetExceeded(SylowlabError):
    """A computation hit an enumeration or search budget.

    Distinct from a false result: callers must treat it as "unknown".
    """

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached


class InvariantViolation(SylowlabError, AssertionError):
    """An internal mathematical invariant failed; indicates a bug."""
