"""Exception hierarchy shared by every module."""


class H8Error(Exception):
    """Base class for all errors raised by h8verify."""


class PoleError(H8Error, ValueError):
    """Argument sits on a pole (within 1e-12)."""


class UnsupportedRegionError(H8Error, ValueError):
    """Argument lies outside the region where the evaluator is accurate."""


class TooCloseToZeroError(H8Error, ValueError):
    """A logarithmic derivative was requested too close to a zero."""


class BoundaryTooCloseError(H8Error, ValueError):
    """The zero-counting contour passes too close to a zero."""


class NonPrimitiveCharacterError(H8Error, ValueError):
    pass


class UnsupportedCharacterError(H8Error, ValueError):
    """Operation only supports real (quadratic) primitive characters."""


class ModulusTooLargeError(H8Error, ValueError):
    pass


class RangeTooLargeError(H8Error, ValueError):
    pass


class NonCoprimeError(H8Error, ValueError):
    pass


class OddNError(H8Error, ValueError):
    pass


class SieveRangeError(H8Error, ValueError):
    """Sieve parameter (u, z, N) outside the admissible window."""


class WorkBoundError(H8Error, ValueError):
    pass


class MissingZeroTableError(H8Error, LookupError):
    pass


class CacheError(H8Error, OSError):
    """Cache file is missing, unreadable, or corrupt."""


class UnknownClaimError(H8Error, KeyError):
    pass


class ConfigError(H8Error, ValueError):
    pass


class StepTooCoarseWarning(UserWarning):
    """Sign-change scan and contour count disagree; zeros may share a grid cell."""
