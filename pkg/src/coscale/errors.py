"""Exception types shared across the toolkit."""


class CoscaleError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CoscaleError):
    """A value violates a domain invariant or references an unknown entity."""


class MergeConflictError(CoscaleError):
    """Two repositories define the same machine type with different fields."""

    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"conflicting catalog entries: {', '.join(self.names)}")


class UndertrainedError(CoscaleError):
    """Not enough (or too degenerate) training data for the requested model."""


class NoUsableDataError(CoscaleError):
    """Every candidate training record was filtered out by the weighting rules."""
