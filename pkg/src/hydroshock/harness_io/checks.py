"""Pass/fail checks on run diagnostics, shared by presets and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import kendalltau

from ..errors import NoPeriodicSegment
from ..simulator import Trajectory, roll_constraint_residual
from ..wave_family import spreading_speed


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: dict

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {self.detail}"


def merge_event(times, counts, distances, ratio: float = 1e-2) -> Optional[float]:
    """First time ``t > 0`` with a single shock and distance below ``ratio`` of its initial value."""
    if distances is None:
        return None
    rel = np.asarray(distances) / distances[0]
    for t, n, r in zip(times, counts, rel):
        if t > 0 and n == 1 and r < ratio:
            return float(t)
    return None


def check_merge(trajectory: Trajectory, ratio: float = 1e-2) -> Check:
    d = trajectory.diagnostics
    t = merge_event(d.times, d.shock_count_series, d.profile_distance_series, ratio)
    rel = None if d.profile_distance_series is None else d.profile_distance_series / d.profile_distance_series[0]
    detail = {
        "merge_time": t,
        "min_distance_ratio": None if rel is None else float(np.min(rel)),
        "single_shock_times": [float(x) for x, n in zip(d.times, d.shock_count_series) if n == 1 and x > 0][:5],
    }
    return Check("census_one_and_distance_decay", t is not None, detail)


def census_trend(times, counts, transient: float, alpha: float = 0.01) -> dict:
    """Monotone-trend statistics of the shock count on ``t >= transient``.

    A one-sided Kendall test replaces literal monotonicity, which individual
    merger events break.
    """
    times = np.asarray(times)
    counts = np.asarray(counts)
    keep = times >= transient
    tau, p = kendalltau(times[keep], counts[keep], alternative="greater")
    return {
        "tau": float(tau),
        "p_value": float(p),
        "first": int(counts[keep][0]),
        "last": int(counts[keep][-1]),
        "increasing": bool(tau > 0 and p < alpha and counts[keep][-1] > counts[keep][0]),
    }


def check_onset(trajectory: Trajectory, lo: float, hi: float, transient: Optional[float] = None) -> Check:
    d = trajectory.diagnostics
    fit = d.front_fit
    slope = None if fit is None else float(fit.slope)
    ok = slope is not None and lo <= slope <= hi
    detail = {"slope": slope, "range": [lo, hi], "prediction": spreading_speed(trajectory.config.params).relative}
    if transient is not None:
        trend = census_trend(d.times, d.shock_count_series, transient)
        detail["census_trend"] = trend
        ok = ok and trend["increasing"]
    return Check("front_onset_slope", ok, detail)


def check_front_relative(trajectory: Trajectory, rel_tol: float = 0.1) -> Check:
    target = spreading_speed(trajectory.config.params).relative
    fit = trajectory.diagnostics.front_fit
    slope = None if fit is None else float(fit.slope)
    ok = slope is not None and abs(slope - target) <= rel_tol * abs(target)
    return Check("front_speed", ok, {"slope": slope, "prediction": target, "rel_tol": rel_tol})


def check_rolls(trajectory: Trajectory, period=(0.8, 1.2), speed=(1.3, 1.5)) -> Check:
    try:
        roll = roll_constraint_residual(trajectory)
    except NoPeriodicSegment as exc:
        return Check("roll_metrics", False, {"error": str(exc)})
    ok = period[0] <= roll.period <= period[1] and speed[0] <= roll.speed <= speed[1]
    return Check("roll_metrics", ok, {"period": roll.period, "speed": roll.speed, "residual": roll.residual})


def check_final_census(trajectory: Trajectory, expected: int = 1) -> Check:
    n = int(trajectory.diagnostics.shock_count_series[-1])
    return Check("final_census", n == expected, {"count": n, "expected": expected})


def check_mass(trajectory: Trajectory, tol: float = 1e-10) -> Check:
    r = float(trajectory.mass_residual_max)
    return Check("mass_residual", r < tol, {"max": r, "tol": tol})
