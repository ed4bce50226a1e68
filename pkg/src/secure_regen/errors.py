"""Exception hierarchy.  The CLI maps these onto exit codes."""


class SecureRegenError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SecureRegenError, ValueError):
    """System or code parameters violate a precondition."""


class FieldError(SecureRegenError, ArithmeticError):
    """Arithmetic that has no answer in F_q (e.g. inverting zero)."""


class SingularMatrixError(FieldError):
    pass


class DecodingError(SecureRegenError):
    """Observations cannot be decoded (too few, or conflicting)."""


class BudgetExceededError(SecureRegenError):
    """An exhaustive computation would exceed its configured budget."""
