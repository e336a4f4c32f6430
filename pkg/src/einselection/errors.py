"""Exception types raised across the package."""


class EinselectionError(Exception):
    pass


class InvariantViolation(EinselectionError, ValueError):
    """A state, matrix or report failed one of its structural invariants."""


class DimensionCapError(EinselectionError, ValueError):
    """The total Hilbert-space dimension exceeds the configured cap."""
