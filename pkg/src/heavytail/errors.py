"""Exception types raised by the library."""


class HeavyTailError(Exception):
    """Base class for all library errors."""


class InvalidInput(HeavyTailError, ValueError):
    """Arguments violate an operation's preconditions."""


class WrongRegime(HeavyTailError, ValueError):
    """A bound was requested outside the tail-exponent range it covers."""


class InvalidSchedule(HeavyTailError, ValueError):
    """The (x, mu, M) schedule cannot support the interval decomposition."""


class UnsupportedScale(HeavyTailError, OverflowError):
    """mu * x is too large to evaluate exponential moments in double precision."""
