class GossZetaError(Exception):
    """Base class for errors raised by gosszeta."""


class PrecisionError(GossZetaError, ValueError):
    """A digit table or series was asked for more than it certifies."""


class BudgetError(GossZetaError, RuntimeError):
    """
    A resource guard tripped or an iteration failed to stabilize.

    :var partial: whatever was computed before giving up, or None
    """
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConsistencyError(GossZetaError, AssertionError):
    """An invariant that the theory guarantees did not hold."""
