"""Exception hierarchy shared across the package.

Every error that can surface through the command line maps to one of
four exit codes: contract violations and bad inputs exit with 1,
refusals to exceed an explicit work budget with 2, violated
mathematical properties with 3, and numerical breakdowns with 4.
"""


class TropcapError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ContractViolation(TropcapError):
    """An input violated a documented precondition (shape, range, kind)."""

    exit_code = 1


class EmptyDomainError(TropcapError):
    """A sampler or census was asked to draw from an empty region."""

    exit_code = 1


class BudgetExceeded(TropcapError):
    """A computation would exceed an explicit work budget.

    Carries the offending size and the budget so callers can report a
    structured refusal instead of hanging.
    """

    exit_code = 2

    def __init__(self, message: str, size: int, budget: int):
        super().__init__(message)
        self.size = size
        self.budget = budget


class PropertyFailure(TropcapError):
    """A mathematical invariant that should always hold was violated."""

    exit_code = 3

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class NumericalError(TropcapError):
    """A numerical routine lost too much precision to certify a result.

    ``index`` identifies the constraint or pivot column at fault when
    that is known, and -1 otherwise.
    """

    exit_code = 4

    def __init__(self, message: str, index: int = -1):
        super().__init__(message)
        self.index = index
