"""Hydraulic shocks of the inclined Saint-Venant equations.

Profiles, closed-form existence and stability classification, endstate
spectra, a point-spectrum search and a finite-volume solver.
"""

from .errors import (
    HydroshockError,
    InvalidParameters,
    NoWaveError,
    NumericalFailure,
)
from .wave_family import (
    DerivedScalars,
    ProfileClass,
    StabilityRegion,
    WaveParams,
    classify_existence,
    classify_stability,
    derive,
    spreading_speed,
    threshold_table,
)
from .profile import HydraulicProfile, build_profile

__version__ = "0.1.0"

__all__ = [
    "DerivedScalars",
    "HydraulicProfile",
    "HydroshockError",
    "InvalidParameters",
    "NoWaveError",
    "NumericalFailure",
    "ProfileClass",
    "StabilityRegion",
    "WaveParams",
    "build_profile",
    "classify_existence",
    "classify_stability",
    "derive",
    "spreading_speed",
    "threshold_table",
]
