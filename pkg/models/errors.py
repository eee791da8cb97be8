"""
Exception hierarchy shared by the models and the app layer.

Every error raised on purpose derives from PavaneError and from the builtin
it refines, so callers that only know about ValueError/OSError keep working.
"""


class PavaneError(Exception):
    """Base class for all PAVANE errors"""


class InvalidPermutationError(PavaneError, ValueError):
    """Input is not a rearrangement of 1..n (or has duplicate values)"""


class InvalidDescriptorError(PavaneError, ValueError):
    """Pattern-set descriptor does not parse or its parameters are out of range"""


class PreconditionError(PavaneError, ValueError):
    """An operation was called on input outside its domain"""


class InsufficientTermsError(PreconditionError):
    """Too few sequence terms for the requested annihilator shape"""


class ResourceCeilingError(PavaneError, RuntimeError):
    """Requested size is above the enumeration ceiling"""


class CacheIOError(PavaneError, OSError):
    """The count cache could not be read or written"""


class InternalInvariantError(PavaneError, AssertionError):
    """A guaranteed invariant failed; this is a bug, never a user error"""
