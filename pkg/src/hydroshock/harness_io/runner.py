"""Analysis tasks, simulation bundles and preset execution."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..pointspec import count_unstable, evans_residual, nonreal_bound, reduced_coeffs
from ..profile import HydraulicProfile, build_profile, decay_rates, rh_residual
from ..simulator import SimConfig, Trajectory, run
from ..spectrum import absolute_lines, asymptotic_thresholds, optimal_gap, spectrum_geometry, weight_window
from ..wave_family import WaveParams, classify_existence, derive, spreading_speed, summary
from . import checks
from .config import OutputSpec, RunRequest, parse_config
from .outputs import jsonable, metadata, write_csv, write_json
from .presets import ExperimentPreset, get_preset

log = logging.getLogger(__name__)

PROFILE_HALF_LENGTH = 40.0
PROFILE_SAMPLES = 8001
RH_TOL = 1e-10
TAIL_REL_TOL = 0.02
MASS_TOL = 1e-10
TOLERANCES = {"rh_residual": RH_TOL, "tail_slope_rel": TAIL_REL_TOL, "mass_residual": MASS_TOL}


def classify_report(params: WaveParams) -> dict:
    out = summary(params)
    s = spreading_speed(params)
    out["s_abs"] = s.s_abs
    out["s_abs_minus_c"] = s.relative
    return out


def profile_report(params: WaveParams, profile: Optional[HydraulicProfile] = None) -> dict:
    prof = profile or build_profile(params, PROFILE_HALF_LENGTH, PROFILE_SAMPLES)
    d = prof.derived
    out = {"profile_type": prof.profile_type.value, "case": prof.profile_type.roman, "c": d.speed_c}
    found = {}
    if prof.subshock is not None:
        rh = abs(rh_residual(prof.subshock.h_minus, prof.subshock.h_plus, d))
        out["subshock"] = {"h_minus": prof.subshock.h_minus, "h_plus": prof.subshock.h_plus, "rh_residual": rh}
        found["rh_residual"] = rh < RH_TOL
    if prof.left is not None:
        eta = decay_rates(d)[0]
        slope = prof.tail_slope()
        out["tail"] = {"observed": slope, "expected": eta}
        found["tail_slope"] = abs(slope - eta) <= TAIL_REL_TOL * abs(eta)
    out["checks"] = found
    return out


def write_profile(path: Path, profile: HydraulicProfile, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    flat = {k: json.dumps(jsonable(v), sort_keys=True) for k, v in sorted(meta.items())}
    path.write_text(profile.to_csv(flat))
    return path


def spectrum_report(params: WaveParams) -> dict:
    geo = spectrum_geometry(params)
    gap = optimal_gap(params)
    d = derive(params)
    lines = {"left": absolute_lines(d, params.h_left), "right": absolute_lines(d, params.h_right)}
    return {
        "weight_window": list(weight_window(params)),
        "asymptotic_window": list(asymptotic_thresholds(params)),
        "theta_opt": gap.theta_opt,
        "eta_opt": gap.eta_opt,
        "eta_inf": list(geo.eta_inf),
        "weights": {"eta_left": geo.eta_left, "eta_right": geo.eta_right},
        "max_real_part": {"left": geo.max_real_part("left"), "right": geo.max_real_part("right")},
        "absolute": {
            side: {"sigma": line.sigma, "branch_points": [complex(b) for b in line.branch_points], "unstable": line.unstable}
            for side, line in lines.items()
        },
        "n_curve_points": int(sum(c.size for c in geo.boundary_curves.values())),
    }


def evans_report(params: WaveParams, lambda_max: float = 10.0) -> dict:
    coeffs = reduced_coeffs(build_profile(params, PROFILE_HALF_LENGTH, PROFILE_SAMPLES))
    scan = count_unstable(coeffs, lambda_max=lambda_max)
    eps = 1e-5
    d0 = abs(evans_residual(coeffs, 0.0))
    dprime = abs(evans_residual(coeffs, eps) - evans_residual(coeffs, -eps)) / (2 * eps)
    bound = nonreal_bound(coeffs)
    return {
        "winding_count": scan.winding_count,
        "min_abs_on_contour": scan.min_abs,
        "excluded_radius": scan.excluded_radius,
        "lambda_max": scan.lambda_max,
        "contour_points": int(scan.contour.size),
        "D0": d0,
        "D0_prime": dprime,
        "nonreal_bound": bound.bound,
        "checks": {"no_unstable_eigenvalues": scan.winding_count == 0, "simple_zero_at_origin": d0 < 1e-6 and dprime > 1e-3},
    }


@dataclass
class Bundle:
    directory: Optional[Path]
    summary: dict
    trajectory: Optional[Trajectory] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", True))


def write_simulation(directory: Path, trajectory: Trajectory, output: OutputSpec, meta: dict) -> list[str]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if output.write_frames:
        for k in range(0, len(trajectory.times), output.frame_every):
            t, h, q = trajectory.snapshot(k)
            name = f"frame_{k:05d}.csv"
            write_csv(directory / name, {"xi": trajectory.xi, "h": h, "q": q}, {**meta, "t": float(t)})
            written.append(name)
    sub = slice(None, None, output.spacetime_every)
    xi = trajectory.xi[sub]
    tt = np.repeat(trajectory.times, xi.size)
    write_csv(directory / "spacetime.csv", {"t": tt, "xi": np.tile(xi, len(trajectory.times)), "h": trajectory.h[:, sub].ravel()}, meta)
    written.append("spacetime.csv")
    write_json(directory / "diagnostics.json", {**trajectory.diagnostics.to_json(), "metadata": meta})
    written.append("diagnostics.json")
    return written


def simulation_checks(preset: Optional[ExperimentPreset], trajectory: Trajectory) -> list[checks.Check]:
    found = [checks.check_mass(trajectory, MASS_TOL)]
    if preset is None:
        return found
    name = preset.name
    if name == "stable_2p28":
        found.append(checks.check_merge(trajectory))
    elif name == "abs_2p30":
        found.append(checks.check_onset(trajectory, -0.006, -0.001, transient=trajectory.config.t_end / 8))
    elif name == "reverse_front":
        found.append(checks.check_front_relative(trajectory, 0.1))
        found.append(checks.check_rolls(trajectory))
    elif name == "riemann_iii":
        found.append(checks.check_final_census(trajectory, 1))
    return found


def simulate(config: SimConfig, distance: bool = True) -> Trajectory:
    t0 = time.perf_counter()
    tr = run(config, distance=distance)
    log.info("simulated %.1f time units in %.1f s (%d steps)", config.t_end, time.perf_counter() - t0, tr.steps)
    return tr


def run_request(request: RunRequest, directory: Optional[Path] = None) -> Bundle:
    """Execute a parsed request; simulation outputs go to ``directory`` when given."""
    params = request.wave()
    meta = metadata(params, preset=request.preset, task=request.task, tolerances=TOLERANCES)
    if request.task == "classify":
        return Bundle(None, {"metadata": meta, "result": classify_report(params)})
    if request.task == "profile":
        return Bundle(None, {"metadata": meta, "result": profile_report(params)})
    if request.task == "spectrum":
        return Bundle(None, {"metadata": meta, "result": spectrum_report(params)})
    if request.task == "evans":
        return Bundle(None, {"metadata": meta, "result": evans_report(params)})
    config = request.sim_config()
    meta.update(grid={"domain": list(config.domain), "n_cells": config.n_cells, "dx": config.dx, "cfl": config.cfl},
                simulation=request.simulation.model_dump(mode="json"))
    tr = simulate(config)
    preset = get_preset(request.preset) if request.preset else None
    found = simulation_checks(preset if preset and preset.params == params else None, tr)
    out_dir = directory or (Path(request.output.directory) if request.output.directory else None)
    files = write_simulation(out_dir, tr, request.output, meta) if out_dir is not None else []
    result = {
        "metadata": meta,
        "files": files,
        "steps": tr.steps,
        "final_shock_count": int(tr.diagnostics.shock_count_series[-1]),
        "checks": {c.name: {"passed": c.passed, **c.detail} for c in found},
        "passed": all(c.passed for c in found),
    }
    if out_dir is not None:
        write_json(Path(out_dir) / "summary.json", result)
    return Bundle(out_dir, result, tr)


def run_preset(name: str, directory: Optional[Path] = None, overrides: Optional[dict] = None) -> Bundle:
    """Run every target of preset ``name`` and write its artifacts into ``directory``.

    ``directory`` defaults to ``./runs/<name>``.  The returned summary, also
    written as ``summary.json``, carries the pass/fail flag of each check.
    """
    preset = get_preset(name)
    directory = Path(directory) if directory is not None else Path("runs") / name
    directory.mkdir(parents=True, exist_ok=True)
    results: dict = {}
    verdicts: dict = {}
    trajectory = None
    for k, params in enumerate(preset.parameter_sets):
        tag = f"set{k + 1}" if len(preset.parameter_sets) > 1 else "wave"
        meta = metadata(params, preset=name, tolerances=TOLERANCES)
        entry: dict = {"params": meta["params"], "classification": classify_report(params)}
        if "profile" in preset.targets:
            prof = build_profile(params, PROFILE_HALF_LENGTH, PROFILE_SAMPLES)
            rep = profile_report(params, prof)
            write_profile(directory / f"profile_{tag}.csv", prof, {**meta, "half_length": PROFILE_HALF_LENGTH, "n_samples": PROFILE_SAMPLES})
            if preset.expected_classes:
                rep["checks"]["class"] = classify_existence(params).roman == preset.expected_classes[k]
            entry["profile"] = rep
            verdicts.update({f"{tag}.profile.{c}": v for c, v in rep["checks"].items()})
        if "spectrum" in preset.targets:
            rep = spectrum_report(params)
            entry["spectrum"] = rep
            if preset.outcome == "window":
                lo, hi = rep["weight_window"]
                verdicts[f"{tag}.spectrum.window_3_5"] = abs(lo - 3) < 1e-9 and abs(hi - 5) < 1e-9
            else:
                verdicts[f"{tag}.spectrum.window_nonempty"] = rep["weight_window"][0] < rep["weight_window"][1]
        if "evans" in preset.targets:
            rep = evans_report(params)
            entry["evans"] = rep
            verdicts.update({f"{tag}.evans.{c}": v for c, v in rep["checks"].items()})
        results[tag] = entry
    if "simulate" in preset.targets:
        doc = {"preset": name, "task": "simulate", **(overrides or {})}
        request = parse_config(json.dumps(doc))
        bundle = run_request(request, directory / "simulation")
        results["simulation"] = bundle.summary
        trajectory = bundle.trajectory
        verdicts.update({f"simulation.{c}": v["passed"] for c, v in bundle.summary["checks"].items()})
    summary_doc = {
        "preset": name,
        "description": preset.description,
        "outcome": preset.outcome,
        "targets": list(preset.targets),
        "metadata": metadata(preset.params, preset=name, tolerances=TOLERANCES),
        "results": results,
        "checks": verdicts,
        "passed": all(verdicts.values()),
    }
    write_json(directory / "summary.json", summary_doc)
    return Bundle(directory, jsonable(summary_doc), trajectory)
