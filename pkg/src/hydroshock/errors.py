"""Exception types shared across the package."""


class HydroshockError(Exception):
    """Base class for all package errors."""


class InvalidParameters(HydroshockError, ValueError):
    """Raised when wave parameters or configuration values are out of range."""


class NoWaveError(HydroshockError):
    """Raised when no traveling profile exists for the requested parameters."""


class ProfileError(HydroshockError):
    """Raised when profile integration fails or leaves its invariant interval."""


class CharacteristicState(HydroshockError, ValueError):
    """Raised when a height coincides with the sonic height H_s."""


class AbsoluteSpectrumError(HydroshockError, ValueError):
    """Raised when a spectral parameter lies on or too near the absolute spectrum."""


class NumericalFailure(HydroshockError):
    """Base class for failures that map to CLI exit code 3."""


class PositivityFailure(NumericalFailure):
    """Raised when the finite-volume height drops below the positivity floor."""

    def __init__(self, message, location=None, time=None):
        super().__init__(message)
        self.location = location
        self.time = time


class BlowUp(NumericalFailure):
    """Raised when the state norm exceeds the blow-up limit."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class Inconclusive(NumericalFailure):
    """Raised when the winding count cannot be resolved by refinement."""


class NotConverged(NumericalFailure):
    """Raised when a discretized eigenvalue does not settle under refinement."""


class NoPeriodicSegment(HydroshockError):
    """Raised when no periodic roll segment can be found in a snapshot."""
