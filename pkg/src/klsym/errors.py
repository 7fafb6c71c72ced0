"""Exception types shared across the package.

The CLI maps these onto deterministic exit codes: domain and resource
problems exit 2, failed mathematical checks exit 1.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceLimitError(RuntimeError):
    """Estimated work or memory exceeds the configured budget."""


class NonRationalError(ArithmeticError):
    """A cyclotomic value expected to be a rational integer is not one."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class IntegrityError(RuntimeError):
    """An internal consistency invariant failed; signals an arithmetic bug."""


class VerificationError(Exception):
    """A mathematical identity the engine checks did not hold on the data."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details if details is not None else {}


EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
