"""Post-processing of comoving snapshots: shocks, distance to the profile, fronts, roll metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from ..errors import NoPeriodicSegment
from ..wave_family import WaveParams, derive
from .initial import bump_support

SHOCK_FRACTION = 0.25


def shock_threshold(params: WaveParams, fraction: float = SHOCK_FRACTION) -> float:
    return fraction * abs(params.h_left - params.h_right)


MERGE_GAP = 3


def shock_census(xi: np.ndarray, h: np.ndarray, threshold: float, merge_gap: int = MERGE_GAP) -> np.ndarray:
    """Locations of jumps ``|h[i+1] - h[i]| > threshold``.

    Flags at most ``merge_gap`` interfaces apart form one shock, so the steep
    smooth precursor of a captured jump is not counted separately.  Each
    shock is placed at the interface of its largest jump.
    """
    jumps = np.abs(np.diff(h))
    flags = jumps > threshold
    if not flags.any():
        return np.empty(0)
    idx = np.flatnonzero(flags)
    groups = np.split(idx, np.flatnonzero(np.diff(idx) > merge_gap) + 1)
    mids = 0.5 * (xi[:-1] + xi[1:])
    return np.array([mids[g[np.argmax(jumps[g])]] for g in groups])


@dataclass
class DistanceFit:
    distance: float
    shift: float
    local_min_ok: bool


class ProfileDistance:
    """Weighted L2 distance to the shifted reference profile.

    With ``y = xi - shift`` the weight is ``exp(-eta_left y)`` for ``y < 0`` and
    ``exp(-eta_right y)`` for ``y > 0`` (``eta_left > 0 > eta_right``), the norm
    in which perturbations swept into the subshock decay.  The weight grows
    away from the shock, so the sum runs over ``window`` only: far-field
    roundoff would otherwise dominate.  Cells within ``exclude_cells`` of the
    reference subshock can be left out.
    """

    def __init__(self, params: WaveParams, xi: np.ndarray, eta_left: Optional[float] = None,
                 eta_right: Optional[float] = None, window=(-10.0, 5.0), exclude_cells: int = 0,
                 search_radius: float = 3.0):
        from ..profile import build_profile
        from ..spectrum import optimal_gap, weight_window

        self.params = params
        self.xi = xi
        self.dx = float(xi[1] - xi[0])
        self.profile = build_profile(params, half_length=40.0, n_samples=8001)
        self.eta_left = weight_window(params).midpoint if eta_left is None else eta_left
        self.eta_right = -5.0 * optimal_gap(params).eta_opt if eta_right is None else eta_right
        self.window = window
        self.exclude_cells = exclude_cells
        self.search_radius = search_radius
        self._tabulate()

    def _tabulate(self, per_cell: int = 20):
        # the reference is sampled once; each side of the subshock is interpolated separately
        step = self.dx / per_cell
        pad = self.search_radius + 2 * self.dx
        left = np.arange(0.0, self.window[0] - pad, -step)[::-1]
        right = np.arange(0.0, self.window[1] + pad, step)
        self._left = (left, self.profile.h_at(left))
        hr = self.profile.h_at(right)
        if self.profile.subshock is not None:
            hr[0] = self.profile.subshock.h_plus
        self._right = (right, hr)

    def reference(self, y: np.ndarray) -> np.ndarray:
        out = np.interp(y, *self._right)
        neg = y <= 0
        out[neg] = np.interp(y[neg], *self._left)
        return out

    def _weight(self, y):
        w = np.exp(-np.where(y < 0, self.eta_left * y, self.eta_right * y))
        return np.where((y >= self.window[0]) & (y <= self.window[1]), w, 0.0)

    def __call__(self, h: np.ndarray, shift: float, cells: Optional[slice] = None) -> float:
        cells = slice(None) if cells is None else cells
        y = self.xi[cells] - shift
        w = self._weight(y)
        if self.exclude_cells and self.profile.subshock is not None:
            w = np.where(np.abs(y) < self.exclude_cells * self.dx, 0.0, w)
        on = w > 0
        diff = h[cells][on] - self.reference(y[on])
        return float(np.sqrt(np.sum(w[on] * diff * diff) * self.dx))

    def _guess(self, h: np.ndarray) -> float:
        d = derive(self.params)
        if self.profile.subshock is not None:
            shocks = shock_census(self.xi, h, shock_threshold(self.params))
            if shocks.size:
                return float(shocks[-1])
        mid = 0.5 * (d.h_left + d.h_right)
        cross = np.flatnonzero(np.diff(np.sign(h - mid)) != 0)
        return float(self.xi[cross[-1]]) if cross.size else 0.0

    def fit(self, h: np.ndarray, guess: Optional[float] = None) -> DistanceFit:
        """Minimize over shifts within ``search_radius`` of ``guess`` (the last shock by default)."""
        g = self._guess(h) if guess is None else guess
        r = self.search_radius
        lo = np.searchsorted(self.xi, g - r + self.window[0] - self.dx)
        hi = np.searchsorted(self.xi, g + r + self.window[1] + self.dx)
        cells = slice(max(lo, 0), hi)
        dist = lambda s: self(h, s, cells)
        grid = g + np.arange(-r, r + 1e-12, 0.25 * self.dx)
        vals = np.array([dist(s) for s in grid])
        k = int(np.argmin(vals))
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        res = minimize_scalar(dist, bounds=(a, b), method="bounded", options={"xatol": 1e-6 * self.dx})
        if res.fun <= vals[k]:
            shift, best = float(res.x), float(res.fun)
        else:
            shift, best = float(grid[k]), float(vals[k])
        delta = 0.05 * self.dx
        ok = dist(shift - delta) >= best - 1e-14 and dist(shift + delta) >= best - 1e-14
        return DistanceFit(best, shift, bool(ok))


def onset_positions(xi, times, h_snapshots, h_left: float, threshold: float, exclude=None, cutoff=None):
    """Leftmost ``xi`` with ``|h - h_left| > threshold`` per snapshot.

    Cells in ``exclude`` (the initial bump support by default) are ignored,
    and so are cells at or right of ``cutoff(k)``, where the traveling
    profile itself departs from ``h_left``.  Returns times and positions of
    snapshots with a detection.
    """
    lo, hi = bump_support() if exclude is None else exclude
    keep = (xi < lo) | (xi > hi)
    ts, ps = [], []
    for k, (t, h) in enumerate(zip(times, h_snapshots)):
        mask = (np.abs(h - h_left) > threshold) & keep
        if cutoff is not None:
            mask &= xi < cutoff(k)
        hit = np.flatnonzero(mask)
        if hit.size:
            ts.append(t)
            ps.append(xi[hit[0]])
    return np.array(ts), np.array(ps)


@dataclass
class FrontFit:
    slope: float
    stderr: float
    intercept: float
    times: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)


def last_continuous_segment(times, positions, max_jump: float):
    """Trailing run of a position series without jumps larger than ``max_jump``."""
    if len(times) == 0:
        return times, positions
    breaks = np.flatnonzero(np.abs(np.diff(positions)) > max_jump)
    start = breaks[-1] + 1 if breaks.size else 0
    return times[start:], positions[start:]


def _profile_cutoff(trajectory, threshold: float):
    """Per-snapshot ``xi`` beyond which the shifted profile differs from ``H_L`` by ``threshold/2``."""
    from ..profile import build_profile

    p = trajectory.config.params
    try:
        prof = build_profile(p, half_length=40.0, n_samples=4001)
    except Exception:
        return None
    d = prof.derived
    dev = np.abs(prof.h_values - d.h_left)
    over = np.flatnonzero(dev > 0.5 * threshold)
    offset = float(prof.grid[over[0]]) if over.size else 0.0
    shock_thr = shock_threshold(p)
    mid = 0.5 * (d.h_left + d.h_right)
    xi = trajectory.xi

    def cutoff(k):
        h = trajectory.h[k]
        if prof.subshock is not None:
            shocks = shock_census(xi, h, shock_thr)
            anchor = shocks[-1] if shocks.size else 0.0
        else:
            cross = np.flatnonzero(np.diff(np.sign(h - mid)) != 0)
            anchor = xi[cross[-1]] if cross.size else 0.0
        return anchor + offset

    return cutoff


def fit_front_speed(trajectory, amplitude_threshold: float = 0.05, t_min: float = 0.0,
                    t_max: Optional[float] = None, max_jump: float = 5.0,
                    min_snapshots: int = 10) -> Optional[FrontFit]:
    """Comoving speed of the leftmost departure from ``H_L`` by least squares in time.

    Detections are taken left of the traveling profile and outside the
    initial bump.  A front must persist to the last snapshot of the window;
    when a pattern nucleates ahead of the current front the series jumps by
    more than ``max_jump`` and only the segment after the last jump is
    fitted.  Returns ``None`` when no persistent front is found.
    """
    times = trajectory.times
    sel = times >= t_min
    if t_max is not None:
        sel &= times <= t_max
    idx = np.flatnonzero(sel)
    if idx.size == 0:
        return None
    cutoff = _profile_cutoff(trajectory, amplitude_threshold)
    ts, ps = onset_positions(
        trajectory.xi, times[idx], trajectory.h[idx], trajectory.config.params.h_left,
        amplitude_threshold, cutoff=None if cutoff is None else (lambda k: cutoff(idx[k])),
    )
    if ts.size == 0 or ts[-1] != times[idx[-1]]:
        return None
    ts, ps = last_continuous_segment(ts, ps, max_jump)
    if ts.size < min_snapshots:
        return None
    r = linregress(ts, ps)
    return FrontFit(float(r.slope), float(r.stderr), float(r.intercept), ts, ps)


@dataclass
class RollMeasurement:
    period: float
    speed: float
    mean_height: float
    q0_roll: float
    q0_roll_spread: float
    q0_shock: float
    residual: float
    shocks: np.ndarray = field(repr=False)


def periodic_segment(shocks: np.ndarray, min_jumps: int = 3, rel_tol: float = 0.2) -> np.ndarray:
    """Longest run of consecutive shocks whose spacings lie within ``rel_tol`` of their median."""
    best = np.empty(0)
    n = shocks.size
    i = 0
    while i < n - 1:
        j = i + 1
        while j < n:
            gaps = np.diff(shocks[i:j + 1])
            med = np.median(gaps)
            if np.all(np.abs(gaps - med) <= rel_tol * med):
                j += 1
            else:
                break
        run = shocks[i:j]
        if run.size > best.size:
            best = run
        i = max(j - 1, i + 1)
    return best if best.size >= min_jumps else np.empty(0)


def roll_constraint_residual(trajectory, snapshot: int = -1, pairs: int = 4,
                             threshold: Optional[float] = None) -> RollMeasurement:
    """Period, speed and mean height of the periodic roll segment, and the mass-balance residual.

    The speed is the lab-frame velocity of the segment's shocks, tracked by
    nearest neighbours over the preceding ``pairs`` snapshot intervals.
    Flux constants use the convention ``Q - c H``; the returned residual is
    ``q0_shock - q0_roll - (c_roll - c_shock) <H_roll>``.
    """
    p = trajectory.config.params
    thr = shock_threshold(p) if threshold is None else threshold
    xi = trajectory.xi
    k = snapshot % len(trajectory.times)
    shocks = shock_census(xi, trajectory.h[k], thr)
    seg = periodic_segment(shocks)
    if seg.size == 0:
        raise NoPeriodicSegment("no run of at least three equally spaced jumps")
    period = float(np.median(np.diff(seg)))
    speeds = []
    for m in range(max(k - pairs, 0), k):
        dt = trajectory.times[m + 1] - trajectory.times[m]
        prev = shock_census(xi, trajectory.h[m], thr)
        nxt = shock_census(xi, trajectory.h[m + 1], thr)
        core = nxt[(nxt >= seg[0]) & (nxt <= seg[-1])] if m + 1 == k else nxt
        for x in core:
            if prev.size:
                dxs = x - prev[np.argmin(np.abs(prev - x))]
                if abs(dxs) < 0.5 * period:
                    speeds.append(dxs / dt)
    if not speeds:
        raise NoPeriodicSegment("roll shocks could not be tracked between snapshots")
    speed = float(np.median(speeds)) + trajectory.frame_speed
    lo, hi = seg[0], seg[-1]
    inside = (xi > lo) & (xi <= hi)
    h = trajectory.h[k][inside]
    q = trajectory.q[k][inside]
    mean_h = float(np.mean(h))
    flux_const = q - speed * h
    d = derive(p)
    q0_roll = float(np.mean(flux_const))
    q0_shock = -d.q0
    residual = q0_shock - q0_roll - (speed - d.speed_c) * mean_h
    return RollMeasurement(period, speed, mean_h, q0_roll, float(np.std(flux_const)), q0_shock, residual, seg)


@dataclass
class Diagnostics:
    times: np.ndarray
    shock_count_series: np.ndarray
    shock_locations: list = field(repr=False)
    profile_distance_series: Optional[np.ndarray] = None
    shift_series: Optional[np.ndarray] = None
    shift_minimum_verified: bool = True
    front_fit: Optional[FrontFit] = None
    mass_residual_max: float = 0.0

    def to_json(self) -> dict:
        fit = None
        if self.front_fit is not None:
            fit = {"slope": self.front_fit.slope, "stderr": self.front_fit.stderr}
        return {
            "times": [float(t) for t in self.times],
            "shock_count_series": [int(n) for n in self.shock_count_series],
            "profile_distance_series": None if self.profile_distance_series is None
            else [float(v) for v in self.profile_distance_series],
            "shift_series": None if self.shift_series is None else [float(v) for v in self.shift_series],
            "front_fit": fit,
            "mass_residual_max": float(self.mass_residual_max),
        }


def compute_diagnostics(trajectory, front_threshold: float = 0.05, distance: bool = True) -> Diagnostics:
    p = trajectory.config.params
    thr = shock_threshold(p)
    locs = [shock_census(trajectory.xi, h, thr) for h in trajectory.h]
    dist = shifts = None
    verified = True
    if distance:
        try:
            pd = ProfileDistance(p, trajectory.xi)
        except Exception:
            pd = None
        if pd is not None:
            fits = [pd.fit(h) for h in trajectory.h]
            dist = np.array([f.distance for f in fits])
            shifts = np.array([f.shift for f in fits])
            verified = all(f.local_min_ok for f in fits)
    return Diagnostics(
        times=trajectory.times,
        shock_count_series=np.array([loc.size for loc in locs]),
        shock_locations=locs,
        profile_distance_series=dist,
        shift_series=shifts,
        shift_minimum_verified=verified,
        front_fit=fit_front_speed(trajectory, front_threshold),
        mass_residual_max=trajectory.mass_residual_max,
    )
