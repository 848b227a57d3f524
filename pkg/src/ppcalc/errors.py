class PpcalcError(Exception):
    """Base class for engine errors."""


class InputError(PpcalcError, ValueError):
    """Malformed or mismatched input (dimensions, rings, arities, syntax)."""


class UnsupportedRingError(PpcalcError):
    """The operation has no finitely presented answer over this ring."""


class DomainError(PpcalcError):
    """A documented precondition of the operation does not hold."""


class ConsistencyError(PpcalcError):
    """Two independent computations that must agree did not."""
