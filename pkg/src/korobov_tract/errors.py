"""Exception types shared across the package."""


class KorobovError(ValueError):
    """A domain error: invalid weights, infeasible query, unsupported cell."""


class SpecError(KorobovError):
    """A weight specification violates the sequence constraints."""

    def __init__(self, message, constraint=None, index=None):
        super().__init__(message)
        self.constraint = constraint
        self.index = index


class ResourceCapError(RuntimeError):
    """A configured resource cap was hit. Never a silent truncation."""

    def __init__(self, message, cap_name=None, lower_bound=None):
        super().__init__(message)
        self.cap_name = cap_name
        # best bound achieved before giving up, when meaningful
        self.lower_bound = lower_bound


class ConvergenceError(ResourceCapError):
    """A series tail bound could not reach the requested tolerance."""
