class LinnikSieveError(Exception):
    """Base exception for linniksieve."""

    pass


class ConfigError(LinnikSieveError):
    """Raised when configuration or a flag combination is invalid."""

    pass


class BudgetError(LinnikSieveError):
    """Raised when a computation would exceed a configured resource budget."""

    pass


class CapacityError(BudgetError):
    """Raised when a sieve or factor table does not fit the memory budget."""

    pass


class RecursionBudgetError(BudgetError):
    """Raised when the recursive smooth-number evaluator exceeds its memo cap."""

    pass


class EnumerationBudgetError(BudgetError):
    """Raised when an exhaustive enumeration is larger than allowed."""

    pass


class VerificationFailure(LinnikSieveError):
    """Raised by the CLI when at least one inequality check failed."""

    def __init__(self, message: str, failed: int = 1):
        super().__init__(message)
        self.failed = failed
