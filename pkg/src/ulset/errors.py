"""Exception types shared across the library."""


class UlsetError(Exception):
    """Base class for every error raised by this library."""


class InvalidInput(UlsetError, ValueError):
    """Malformed, out-of-range or dimensionally inconsistent input."""


class DirectionRejected(UlsetError):
    """Direction vector failed its recession-cone certificate."""


class Unsupported(UlsetError):
    """Operation is not defined for this set representation."""


class PreconditionFailed(UlsetError):
    """A documented precondition of the operation does not hold."""


class EmptyContour(UlsetError):
    """No cell of the sampling grid produced a usable function value."""
