"""Exception hierarchy.  The CLI maps these onto its exit codes."""


class SymcmError(Exception):
    """Base class for all library errors."""


class StructuralError(SymcmError, ValueError):
    """Mismatched degrees of freedom or an out-of-range variable index."""


class EvaluationError(SymcmError, ValueError):
    """Substitution hit a pole (negative hbar power at hbar = 0)."""


class LimitUndefinedError(SymcmError, ValueError):
    """hbar -> 0 requested for a value carrying negative hbar powers."""


class PreconditionError(SymcmError, ValueError):
    """An operation's documented precondition does not hold."""


class InternalConsistencyError(SymcmError, RuntimeError):
    """A result violated an invariant that valid inputs can never violate."""
