"""Exception hierarchy shared by every module.

The CLI maps each family to an exit code, so new errors should subclass one
of the three leaves below rather than :class:`AnetError` directly.
"""


class AnetError(Exception):
    """Base class for all errors raised by the package."""


class PreconditionError(AnetError, ValueError):
    """An input violates the documented preconditions of an operation."""


class SizeGuardError(AnetError, ValueError):
    """An input is too large for the exact (table-based) algorithms."""


class VerificationError(AnetError, AssertionError):
    """An internal cross-check failed. Always indicates a bug."""


class AlphabetMismatchError(PreconditionError):
    pass


class DimensionMismatchError(PreconditionError):
    pass


class RestrictionError(PreconditionError):
    pass


class NotTwoNilpotentError(PreconditionError):
    pass


class ConditionNotMetError(PreconditionError):
    pass


class NotHamiltonianError(PreconditionError):
    pass
