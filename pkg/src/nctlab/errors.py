"""Exception taxonomy shared by all nctlab modules."""


class NCTLabError(Exception):
    """Base class for all nctlab errors."""


class InvalidArgument(NCTLabError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(NCTLabError):
    """A result would exceed a configured size cap (degree or support)."""


class AccuracyError(NCTLabError):
    """An adaptive numerical routine failed to converge to its tolerance."""


class ConstructionError(NCTLabError):
    """A constructed object violates its own invariants beyond tolerance."""


class UsageError(NCTLabError):
    """Bad command-line or configuration input."""
