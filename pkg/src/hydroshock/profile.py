"""Traveling-wave profiles ``H(x)`` in the comoving coordinate.

The profile obeys the scalar ODE

    H' = F^2 (H - H_L)(H - H_R)(H - H_out) / ((H - H_s)(H^2 + H H_s + H_s^2)),

with ``Q = c H - q0``.  Discontinuous profiles carry a single subshock at
``x = 0`` with ``H(0-) = H_*`` and ``H = H_R`` for ``x > 0``.

Integration is carried out on the deviation ``y = H - H_end`` from the
endstate the branch converges to, with a purely relative tolerance, so that
the exponential tails keep full relative accuracy down to the truncation
level.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import CharacteristicState, InvalidParameters, NoWaveError, ProfileError
from .wave_family import DerivedScalars, ProfileClass, WaveParams, classify_existence, derive

RTOL = 1e-10
TAIL_CUTOFF = 1e-13


def profile_rhs(h, derived: DerivedScalars):
    """Slope ``dH/dx`` of the profile ODE at height(s) ``h``."""
    h = np.asarray(h, dtype=float) if not np.iscomplexobj(h) else np.asarray(h)
    hs = derived.h_s
    if np.any(h == hs):
        raise CharacteristicState(f"profile ODE is singular at the sonic height H_s = {hs}")
    num = derived.froude**2 * (h - derived.h_left) * (h - derived.h_right) * (h - derived.h_out)
    den = (h - hs) * (h * h + h * hs + hs * hs)
    out = num / den
    return out if out.ndim else out[()]


def decay_rates(derived: DerivedScalars) -> tuple[float, float]:
    """Linearized rates ``(eta_L_inf, eta_R_inf)`` of the profile ODE at the endstates.

    ``H - H_L ~ exp(eta_L_inf x)`` as ``x -> -inf`` and likewise at ``H_R``.
    """
    f2 = derived.froude**2
    hl, hr, ho, hs = derived.h_left, derived.h_right, derived.h_out, derived.h_s
    eta_l = f2 * (hl - hr) * (hl - ho) / ((hl - hs) * (hl * hl + hl * hs + hs * hs))
    eta_r = f2 * (hr - hl) * (hr - ho) / ((hr - hs) * (hr * hr + hr * hs + hs * hs))
    return eta_l, eta_r


def rh_residual(h_minus: float, h_plus: float, derived: DerivedScalars) -> float:
    """Jump of ``q0^2/H + H^2/(2F^2)`` across a discontinuity (zero for an admissible jump)."""
    if h_minus <= 0.0 or h_plus <= 0.0:
        raise InvalidParameters("heights must be positive")

    def m(h):
        return derived.q0**2 / h + h * h / (2.0 * derived.froude**2)

    return m(h_plus) - m(h_minus)


def implicit_oracle(h_a: float, h_b: float, derived: DerivedScalars) -> float:
    """Exact comoving distance ``x(h_b) - x(h_a)`` along a smooth profile piece.

    Integrates ``dx/dH = (H^3 - H_s^3) / (F^2 (H - H_L)(H - H_R)(H - H_out))``
    in closed form by partial fractions.
    """
    if h_a == h_b:
        return 0.0
    lo, hi = min(h_a, h_b), max(h_a, h_b)
    roots = (derived.h_left, derived.h_right, derived.h_out)
    for special in roots + (derived.h_s,):
        if lo <= special <= hi:
            raise InvalidParameters(
                f"interval [{lo}, {hi}] contains the critical height {special}"
            )
    hs3 = derived.h_s**3
    total = h_b - h_a
    for k, r in enumerate(roots):
        others = [roots[j] for j in range(3) if j != k]
        residue = (r**3 - hs3) / ((r - others[0]) * (r - others[1]))
        total += residue * math.log(abs((h_b - r) / (h_a - r)))
    return total / derived.froude**2


@dataclass(frozen=True)
class Subshock:
    location: float
    h_minus: float
    h_plus: float


@dataclass(frozen=True)
class _Branch:
    """Dense solution of one smooth piece, stored as deviation from ``endstate``."""

    endstate: float
    x_anchor: float
    x_end: float  # where the integration stopped (tail cutoff or domain end)
    sol: Callable

    def deviation(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = sorted((self.x_anchor, self.x_end))
        inside = (x >= lo) & (x <= hi)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self.sol(x[inside])[0]
        return out


@dataclass(frozen=True)
class HydraulicProfile:
    params: WaveParams
    derived: DerivedScalars
    grid: np.ndarray
    h_values: np.ndarray
    subshock: Optional[Subshock]
    profile_type: ProfileClass
    left: Optional[_Branch] = field(default=None, repr=False)
    right: Optional[_Branch] = field(default=None, repr=False)

    @property
    def q_values(self) -> np.ndarray:
        return self.derived.flux_at(self.h_values)

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def h_at(self, x) -> np.ndarray:
        """Dense evaluation; at ``x = 0`` a discontinuous profile returns ``H(0-)``."""
        return _evaluate(self.derived, self.left, self.right, x)

    def deviation_left(self, x) -> np.ndarray:
        """``H(x) - H_L`` on ``x <= 0`` without the loss of digits of ``h_at``."""
        if self.left is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.left.deviation(x)

    def h_left_branch(self, x) -> np.ndarray:
        """Smooth piece on ``x <= 0`` continued by ``H_L`` beyond its tail."""
        return self.derived.h_left + self.deviation_left(x)

    def position_of(self, h: float) -> float:
        """Comoving coordinate at which the smooth part of the profile equals ``h``."""
        if self.profile_type is ProfileClass.RIEMANN_SHOCK:
            raise ProfileError("a Riemann profile has no smooth piece to invert")
        branch = self.left
        if self.subshock is None and self.right is not None:
            mid = 0.5 * (self.derived.h_left + self.derived.h_right)
            if (h - mid) * (self.derived.h_right - mid) > 0:
                branch = self.right
        lo, hi = sorted((branch.x_anchor, branch.x_end))

        def g(x):
            return branch.endstate + branch.sol(x)[0] - h

        if g(lo) * g(hi) > 0:
            raise ProfileError(f"height {h} is outside the resolved smooth piece")
        return brentq(g, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=200)

    def tail_slope(self, width: float = 1.0) -> float:
        """Observed log-slope of ``|H - H_L|`` at the far left end of the smooth piece."""
        if self.left is None:
            raise ProfileError("profile has no left tail")
        x0 = self.left.x_end
        xs = np.array([x0 + 1e-9, x0 + width])
        y = np.abs(self.left.deviation(xs))
        return float(np.log(y[1] / y[0]) / (xs[1] - xs[0]))

    def to_csv(self, metadata: Optional[dict] = None) -> str:
        buf = io.StringIO()
        for key, value in (metadata or {}).items():
            buf.write(f"# {key}: {value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "h", "q"])
        d = self.derived
        for x, h in zip(self.grid, self.h_values):
            w.writerow([repr(float(x)), repr(float(h)), repr(float(d.flux_at(h)))])
            if x == 0.0 and self.subshock is not None:
                hp = self.subshock.h_plus
                w.writerow([repr(0.0), repr(float(hp)), repr(float(d.flux_at(hp)))])
        return buf.getvalue()


def _evaluate(d: DerivedScalars, left, right, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    neg = x <= 0.0
    out[neg] = d.h_left if left is None else d.h_left + left.deviation(x[neg])
    if right is None:
        out[~neg] = d.h_right
    else:
        out[~neg] = d.h_right + right.deviation(x[~neg])
    return out


def _other_roots(derived: DerivedScalars, endstate: float) -> tuple[float, float]:
    roots = [derived.h_left, derived.h_right, derived.h_out]
    roots.remove(endstate)
    return roots[0], roots[1]


def _solve_branch(derived: DerivedScalars, endstate: float, h_start: float, x_stop: float) -> _Branch:
    r1, r2 = _other_roots(derived, endstate)
    hs = derived.h_s
    f2 = derived.froude**2
    y0 = h_start - endstate
    side = math.copysign(1.0, y0)
    crossed_sonic = (h_start - hs) > 0

    def rhs(x, y):
        h = endstate + y
        return f2 * y * (h - r1) * (h - r2) / ((h - hs) * (h * h + h * hs + hs * hs))

    def tail(x, y):
        return abs(y[0]) - TAIL_CUTOFF * max(endstate, 1.0)

    tail.terminal = True
    tail.direction = -1

    res = solve_ivp(
        rhs,
        (0.0, x_stop),
        [y0],
        method="RK45",
        rtol=RTOL,
        atol=1e-300,
        dense_output=True,
        events=tail,
    )
    if res.status < 0:
        raise ProfileError(f"profile integration failed: {res.message}")
    y = res.y[0]
    if np.any(np.sign(y) != side) or np.any(((endstate + y) - hs > 0) != crossed_sonic):
        raise ProfileError("profile left its invariant interval (crossed an equilibrium or H_s)")
    return _Branch(endstate=endstate, x_anchor=0.0, x_end=float(res.t[-1]), sol=res.sol)


def build_profile(params: WaveParams, half_length: float = 30.0, n_samples: int = 6001) -> HydraulicProfile:
    """Sample the traveling-wave profile on a uniform grid of ``[-half_length, half_length]``.

    The grid always contains ``x = 0`` and has ``2 * (n_samples // 2) + 1`` points.
    Smooth profiles are anchored by ``H(0) = (H_L + H_R) / 2``.
    """
    if half_length <= 0 or n_samples < 3:
        raise InvalidParameters("half_length must be positive and n_samples >= 3")
    kind = classify_existence(params)
    if not kind.exists:
        raise NoWaveError(f"no profile connects H_L={params.h_left} to H_R={params.h_right} at F={params.froude} ({kind.value})")
    d = derive(params)
    m = n_samples // 2
    grid = np.linspace(-half_length, half_length, 2 * m + 1)
    grid[m] = 0.0

    left = right = None
    subshock = None
    if kind is ProfileClass.RIEMANN_SHOCK:
        subshock = Subshock(0.0, d.h_left, d.h_right)
    elif kind.discontinuous:
        left = _solve_branch(d, d.h_left, d.h_star, -half_length)
        subshock = Subshock(0.0, d.h_star, d.h_right)
    else:
        h_mid = 0.5 * (d.h_left + d.h_right)
        left = _solve_branch(d, d.h_left, h_mid, -half_length)
        right = _solve_branch(d, d.h_right, h_mid, half_length)

    h_values = _evaluate(d, left, right, grid)
    return HydraulicProfile(params, d, grid, h_values, subshock, kind, left, right)
