"""Finite-volume evolution of the inclined shallow-water equations and run diagnostics."""

from .diagnostics import (
    Diagnostics,
    FrontFit,
    ProfileDistance,
    RollMeasurement,
    compute_diagnostics,
    fit_front_speed,
    onset_positions,
    periodic_segment,
    roll_constraint_residual,
    shock_census,
    shock_threshold,
)
from .initial import bump, ic_dambreak, ic_profile
from .physics import equilibrium, flux, flux_jacobian, source, wave_speeds
from .solver import (
    BoundaryKind,
    InitialKind,
    SimConfig,
    SimState,
    Splitting,
    Stepper,
    Trajectory,
    initial_state,
    integrate,
    step,
)


def run(config: SimConfig, front_threshold: float = 0.05, distance: bool = True, callback=None) -> Trajectory:
    """Integrate ``config`` and attach :class:`Diagnostics` to the returned trajectory."""
    trajectory = integrate(config, callback=callback)
    trajectory.diagnostics = compute_diagnostics(trajectory, front_threshold, distance)
    return trajectory


__all__ = [
    "BoundaryKind", "Diagnostics", "FrontFit", "InitialKind", "ProfileDistance", "RollMeasurement",
    "SimConfig", "SimState", "Splitting", "Stepper", "Trajectory", "bump", "compute_diagnostics",
    "equilibrium", "fit_front_speed", "flux", "flux_jacobian", "ic_dambreak", "ic_profile",
    "initial_state", "integrate", "onset_positions", "periodic_segment", "roll_constraint_residual",
    "run", "shock_census", "shock_threshold", "source", "step", "wave_speeds",
]
