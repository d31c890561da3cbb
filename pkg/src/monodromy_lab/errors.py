"""Exception types shared across the library."""


class MonodromyLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(MonodromyLabError):
    pass


class FieldMismatch(MonodromyLabError):
    pass


class NotNilpotentError(MonodromyLabError):
    pass


class PreconditionViolated(MonodromyLabError):
    pass


class SpectrumNotSplit(MonodromyLabError):
    pass


class ConeMismatch(MonodromyLabError):
    pass


class NotInteriorError(MonodromyLabError):
    pass


class NotRankOne(MonodromyLabError):
    pass


class NotPureError(MonodromyLabError):
    pass


class NotStandardLogPoint(MonodromyLabError):
    pass


class NotUnipotentError(MonodromyLabError):
    pass


class MembershipLost(MonodromyLabError):
    """A kernel/cokernel/image failed to stay in the category: bug signal."""


class ValidationFailed(MonodromyLabError):
    pass


class ComplexNotClosed(MonodromyLabError):
    """d1 ∘ d0 != 0: bug signal, the operators cannot commute."""


class InternalInconsistency(MonodromyLabError):
    """A verification that must succeed on valid input failed: bug signal."""


class UndefinedPair(MonodromyLabError):
    pass


class SchemaError(MonodromyLabError):
    """Malformed input document; carries a human-readable location."""
