"""Time stepping of the balance law on a uniform grid, optionally in a moving frame."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..errors import BlowUp, InvalidParameters, PositivityFailure
from ..wave_family import WaveParams, derive
from . import kernels
from .initial import ic_dambreak, ic_profile

H_FLOOR = 1e-10
BLOWUP_NORM = 1e6


class InitialKind(str, enum.Enum):
    DAMBREAK_BUMP = "dambreak_bump"
    DAMBREAK = "dambreak"
    PROFILE_PLUS_PERTURBATION = "profile_plus_perturbation"
    CUSTOM = "custom"


class BoundaryKind(str, enum.Enum):
    FIXED_EQUILIBRIUM = "fixed_equilibrium"
    OUTFLOW = "outflow"


class Splitting(str, enum.Enum):
    GODUNOV = "godunov"
    STRANG = "strang"


@dataclass(frozen=True)
class SimConfig:
    """Run description.  ``domain`` is given in the comoving coordinate ``xi = x - frame_speed t``.

    ``solve_in_frame`` integrates the flux ``f(w) - s w`` on the fixed ``xi``
    grid; otherwise the lab-frame problem is solved on a domain stretched
    to follow the frame and snapshots are resampled by linear interpolation.
    """

    params: WaveParams
    domain: tuple = (-100.0, 300.0)
    n_cells: int = 8000
    cfl: float = 0.45
    t_end: float = 100.0
    output_stride: float = 1.0
    ic: InitialKind = InitialKind.DAMBREAK_BUMP
    bc: BoundaryKind = BoundaryKind.FIXED_EQUILIBRIUM
    frame_speed: Optional[float] = None
    second_order: bool = True
    splitting: Splitting = Splitting.GODUNOV
    solve_in_frame: bool = True
    perturbation_amplitude: float = 1.0
    custom_h: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    custom_q: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        x_min, x_max = (float(v) for v in self.domain)
        if not x_min < x_max:
            raise InvalidParameters("domain must satisfy x_min < x_max")
        if int(self.n_cells) < 16:
            raise InvalidParameters("n_cells must be at least 16")
        if not 0 < self.cfl < 1:
            raise InvalidParameters("cfl must lie in (0, 1)")
        if not self.t_end >= 0 or not self.output_stride > 0:
            raise InvalidParameters("t_end must be nonnegative and output_stride positive")
        if self.ic is InitialKind.CUSTOM and (self.custom_h is None or self.custom_q is None):
            raise InvalidParameters("custom initial data needs custom_h and custom_q")
        object.__setattr__(self, "domain", (x_min, x_max))
        object.__setattr__(self, "ic", InitialKind(self.ic))
        object.__setattr__(self, "bc", BoundaryKind(self.bc))
        object.__setattr__(self, "splitting", Splitting(self.splitting))

    @property
    def speed(self) -> float:
        return derive(self.params).speed_c if self.frame_speed is None else float(self.frame_speed)

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.n_cells

    def centers(self) -> np.ndarray:
        return self.domain[0] + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class SimState:
    h: np.ndarray
    q: np.ndarray
    t: float = 0.0
    steps: int = 0


def initial_state(config: SimConfig, x: Optional[np.ndarray] = None) -> SimState:
    x = config.centers() if x is None else x
    p = config.params
    if config.ic is InitialKind.DAMBREAK_BUMP:
        h, q = ic_dambreak(p.h_left, p.h_right, x, perturbed=True)
        if config.perturbation_amplitude != 1.0:
            h0, _ = ic_dambreak(p.h_left, p.h_right, x, perturbed=False)
            h = h0 + config.perturbation_amplitude * (h - h0)
    elif config.ic is InitialKind.DAMBREAK:
        h, q = ic_dambreak(p.h_left, p.h_right, x, perturbed=False)
    elif config.ic is InitialKind.PROFILE_PLUS_PERTURBATION:
        from ..profile import build_profile

        h, q = ic_profile(build_profile(p), x, config.perturbation_amplitude)
    else:
        h = np.asarray(config.custom_h, dtype=float).copy()
        q = np.asarray(config.custom_q, dtype=float).copy()
        if h.shape != x.shape or q.shape != x.shape:
            raise InvalidParameters("custom samples must match the cell count")
    if np.any(~(h > 0)):
        raise InvalidParameters("initial height must be positive")
    return SimState(h=np.asarray(h, float), q=np.asarray(q, float))


class Stepper:
    """Holds the padded work arrays of one run on a fixed grid.

    ``s`` is the speed of the computational frame (zero for the lab frame).
    """

    def __init__(self, config: SimConfig, state: SimState, x: np.ndarray, s: float):
        self.config = config
        self.x = x
        self.dx = float(x[1] - x[0])
        self.s = s
        p = config.params
        self.inv_f = 1.0 / p.froude
        self.bc_kind = 0 if config.bc is BoundaryKind.FIXED_EQUILIBRIUM else 1
        self.left = (p.h_left, p.h_left**1.5)
        self.right = (p.h_right, p.h_right**1.5)
        n = x.size
        g = kernels.NGHOST
        self.h = np.empty(n + 2 * g)
        self.q = np.empty(n + 2 * g)
        self.h[g:-g] = state.h
        self.q[g:-g] = state.q
        self.fluxes = np.zeros((n + 1, 2))
        self.t = state.t
        self.steps = state.steps
        self.mass_residual_max = 0.0
        self._fill()

    def _fill(self):
        kernels.fill_ghosts(self.h, self.q, self.bc_kind, *self.left, *self.right)

    @property
    def interior(self):
        g = kernels.NGHOST
        return self.h[g:-g], self.q[g:-g]

    def state(self) -> SimState:
        h, q = self.interior
        return SimState(h.copy(), q.copy(), self.t, self.steps)

    def stable_dt(self) -> float:
        speed = kernels.max_comoving_speed(self.h, self.q, self.inv_f, self.s)
        return self.config.cfl * self.dx / max(speed, 1e-300)

    def advance(self, dt: float, check_mass: bool = True) -> None:
        cfg = self.config
        g = kernels.NGHOST
        strang = cfg.splitting is Splitting.STRANG
        if strang:
            kernels.source_step(self.h, self.q, 0.5 * dt)
            self._fill()
        before = self.h[g:-g].copy() if check_mass else None
        kernels.hyperbolic_step(self.h, self.q, dt, self.dx, self.inv_f, self.s, cfg.second_order, self.fluxes)
        if check_mass:
            change = float(np.sum(self.h[g:-g] - before)) * self.dx
            boundary = dt * (self.fluxes[0, 0] - self.fluxes[-1, 0])
            self.mass_residual_max = max(self.mass_residual_max, abs(change - boundary))
        kernels.source_step(self.h, self.q, 0.5 * dt if strang else dt)
        self._fill()
        self.t += dt
        self.steps += 1
        self._check()

    def _check(self):
        h, q = self.interior
        i = int(np.argmin(h))
        if not h[i] >= H_FLOOR:
            raise PositivityFailure(f"height {h[i]:.3e} below floor", location=float(self.x[i]), time=self.t)
        norm = max(float(np.max(np.abs(h))), float(np.max(np.abs(q))))
        if not norm <= BLOWUP_NORM:
            raise BlowUp(f"state norm {norm:.3e} exceeds {BLOWUP_NORM:g}", time=self.t)


def step(state: SimState, config: SimConfig, dt: Optional[float] = None) -> SimState:
    """One split update of ``state`` on the comoving grid of ``config``; returns a new state."""
    stepper = Stepper(config, state, config.centers(), config.speed if config.solve_in_frame else 0.0)
    stepper.advance(stepper.stable_dt() if dt is None else dt)
    return stepper.state()


@dataclass
class Trajectory:
    """Comoving snapshots ``h[k, j]`` at ``times[k]`` on the grid ``xi``."""

    config: SimConfig
    xi: np.ndarray
    times: np.ndarray
    h: np.ndarray
    q: np.ndarray
    mass_residual_max: float
    steps: int
    diagnostics: Optional[object] = None

    @property
    def frame_speed(self) -> float:
        return self.config.speed

    def snapshot(self, k: int):
        return self.times[k], self.h[k], self.q[k]


def _lab_grid(config: SimConfig):
    s = config.speed
    dx = config.dx
    lo, hi = config.domain
    lo_lab = lo + min(0.0, s * config.t_end)
    hi_lab = hi + max(0.0, s * config.t_end)
    n = int(math.ceil((hi_lab - lo_lab) / dx))
    return lo_lab + (np.arange(n) + 0.5) * dx


def integrate(config: SimConfig, callback: Optional[Callable] = None, check_mass: bool = True) -> Trajectory:
    """Advance to ``t_end`` recording comoving snapshots every ``output_stride``."""
    xi = config.centers()
    if config.solve_in_frame:
        x = xi
        s = config.speed
    else:
        x = _lab_grid(config)
        s = 0.0
    stepper = Stepper(config, initial_state(config, x), x, s)
    frame = config.speed
    n_out = int(math.floor(config.t_end / config.output_stride + 1e-9))
    out_times = [k * config.output_stride for k in range(n_out + 1)]
    if out_times[-1] < config.t_end - 1e-12:
        out_times.append(config.t_end)
    hs, qs = [], []

    def record():
        h, q = stepper.interior
        if config.solve_in_frame:
            hs.append(h.copy())
            qs.append(q.copy())
        else:
            pts = frame * stepper.t + xi
            hs.append(np.interp(pts, x, h))
            qs.append(np.interp(pts, x, q))
        if callback is not None:
            callback(stepper.t, hs[-1], qs[-1])

    record()
    for target in out_times[1:]:
        while stepper.t < target - 1e-12:
            dt = min(stepper.stable_dt(), target - stepper.t)
            stepper.advance(dt, check_mass)
        stepper.t = target
        record()
    return Trajectory(
        config=config,
        xi=xi,
        times=np.array(out_times),
        h=np.array(hs),
        q=np.array(qs),
        mass_residual_max=stepper.mass_residual_max,
        steps=stepper.steps,
    )


def with_overrides(config: SimConfig, **kw) -> SimConfig:
    return replace(config, **kw)
