"""Exception hierarchy shared by all modules."""


class BiconservativeError(Exception):
    """Base class for library errors."""


class DomainError(BiconservativeError, ValueError):
    """Inputs lie outside the mathematical domain of an operation."""


class NumericError(BiconservativeError, ArithmeticError):
    """A numerical procedure failed to meet its contract.

    ``details`` carries whatever diagnostics the failing routine had
    (best estimate, error bound, residuals, offending arc-length, ...).
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details
