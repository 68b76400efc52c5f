"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2, everything else
derived from ShiftPressError -> 3.
"""


class ShiftPressError(Exception):
    """Base class for all package errors."""


class ConfigError(ShiftPressError):
    """Bad input file, malformed JSON, or invalid run parameters."""


class StructuralError(ShiftPressError):
    """System violates a structural requirement (stranded symbol, not strongly connected, ...)."""


class PreconditionError(ShiftPressError):
    """An operation was called outside its stated precondition."""


class ResourceBudgetError(ShiftPressError):
    """An enumeration exceeded its word budget; never silently truncated."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class InfeasibleError(ShiftPressError):
    """A construction has no feasible parameters; carries the failing inequalities."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class CertificateError(ShiftPressError):
    """A gluing certificate failed verification; carries a counterexample."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
