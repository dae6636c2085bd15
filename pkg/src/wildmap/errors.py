"""Exception hierarchy shared across the package."""


class WildmapError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WildmapError, ValueError):
    """Input lies outside an operation's mathematical domain."""


class PrecisionError(WildmapError, ArithmeticError):
    """Floating-point evaluation would sink below the underflow guard."""


class ConstructionError(WildmapError):
    """A branch or map cannot be built from the given parameters."""


class ConvergenceError(WildmapError, RuntimeError):
    """An iterative numeric routine failed to reach its tolerance."""


class ResourceLimitError(WildmapError):
    """An enumeration or table-size guard was exceeded."""


class ScheduleExhausted(WildmapError, LookupError):
    """An explicit-table proportion schedule has no entry at the requested index."""
