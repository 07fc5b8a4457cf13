"""Exception types shared across the package."""


class ShqError(Exception):
    """Base class for all package-specific errors."""


class InputDomainError(ShqError, ValueError):
    """Arguments violate a documented precondition (bad index, non-finite entry)."""


class OutsideDomainError(ShqError, ValueError):
    """A tuple or matrix lies outside the cone an operation requires."""


class SamplingExhaustedError(ShqError, RuntimeError):
    """The cone sampler failed to reach membership within its shift budget."""


class ConfigurationError(ShqError, ValueError):
    """An experiment configuration is inconsistent or names an unknown entity."""


class NoConvergenceError(ShqError, RuntimeError):
    """Newton or continuation stalled.  Carries the last iterate when available."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class AdmissibilityError(ShqError, RuntimeError):
    """An iterate left the admissible cone and damping could not repair it."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class MaximumPrincipleError(ShqError, RuntimeError):
    """A solution violates the expected sign condition in the interior."""


class CorruptInputError(ShqError, ValueError):
    """A solution snapshot failed its integrity checksum."""
