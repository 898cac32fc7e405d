"""Command-line front door.

Exit codes: 0 on success, 2 on validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..errors import AbsoluteSpectrumError, HydroshockError, InvalidParameters, NoWaveError, NumericalFailure
from ..profile import build_profile
from ..wave_family import WaveParams
from .config import parse_config
from .outputs import dumps, metadata
from .presets import PRESETS
from .runner import (
    PROFILE_HALF_LENGTH,
    PROFILE_SAMPLES,
    classify_report,
    evans_report,
    run_preset,
    run_request,
    spectrum_report,
    write_profile,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
GRID_KEYS = ("h_left", "h_right", "froude")
SWEEP_TASKS = {"classify": classify_report, "spectrum": spectrum_report, "evans": evans_report}


def parse_grid(spec: str) -> list[WaveParams]:
    """Expand ``"h_right=0.7;froude=2.0:2.6:7"`` into a list of parameter sets.

    Each axis is ``key=v1,v2,...`` or ``key=start:stop:num`` (inclusive
    ``linspace``).  Missing axes default to ``h_left=1``.
    """
    axes = {"h_left": [1.0]}
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        key, sep, values = part.partition("=")
        key = key.strip()
        if not sep or key not in GRID_KEYS:
            raise InvalidParameters(f"grid axis {part!r} must look like <key>=<values> with key in {GRID_KEYS}")
        try:
            if ":" in values:
                start, stop, num = values.split(":")
                axes[key] = list(np.linspace(float(start), float(stop), int(num)))
            else:
                axes[key] = [float(v) for v in values.split(",")]
        except ValueError:
            raise InvalidParameters(f"cannot read values of grid axis {key!r}: {values!r}") from None
    missing = [k for k in GRID_KEYS if k not in axes]
    if missing:
        raise InvalidParameters(f"grid is missing axes {missing}")
    return [WaveParams(*combo) for combo in itertools.product(*(axes[k] for k in GRID_KEYS))]


def _sweep_point(task: str, params: WaveParams) -> dict:
    row = {"h_left": params.h_left, "h_right": params.h_right, "froude": params.froude}
    try:
        row["result"] = SWEEP_TASKS[task](params)
        row["status"] = "ok"
    except HydroshockError as exc:
        row["status"] = type(exc).__name__
        row["message"] = str(exc)
    return row


def _wave_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h-left", type=float, default=1.0)
    p.add_argument("--h-right", type=float, required=True)
    p.add_argument("--froude", type=float, required=True)


def _params(args) -> WaveParams:
    return WaveParams(args.h_left, args.h_right, args.froude)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hydroshock", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="existence class, stability region and thresholds")
    _wave_args(p)

    p = sub.add_parser("profile", help="sample a traveling-wave profile as CSV")
    _wave_args(p)
    p.add_argument("--half-length", type=float, default=PROFILE_HALF_LENGTH)
    p.add_argument("--n-samples", type=int, default=PROFILE_SAMPLES)
    p.add_argument("--out", type=Path, help="CSV path (stdout when omitted)")

    p = sub.add_parser("spectrum", help="weight window, spectral gap and absolute spectra")
    _wave_args(p)

    p = sub.add_parser("evans", help="winding count of the Evans-type residual")
    _wave_args(p)
    p.add_argument("--lambda-max", type=float, default=10.0)

    p = sub.add_parser("simulate", help="run a JSON-configured request")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out", type=Path, help="output directory for simulation artifacts")
    p.add_argument("--lenient", action="store_true", help="warn about unknown keys instead of failing")

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", nargs="?")
    p.add_argument("--out", type=Path)
    p.add_argument("--list", action="store_true")

    p = sub.add_parser("sweep", help="evaluate a task over a parameter grid")
    p.add_argument("--grid", required=True, help='e.g. "h_right=0.7;froude=2.0:2.6:7"')
    p.add_argument("--task", choices=sorted(SWEEP_TASKS), default="classify")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path)
    return parser


def _emit(obj, out=None) -> None:
    text = dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "classify":
        _emit(classify_report(_params(args)))
    elif cmd == "profile":
        params = _params(args)
        prof = build_profile(params, args.half_length, args.n_samples)
        meta = metadata(params, half_length=args.half_length, n_samples=args.n_samples)
        if args.out is None:
            sys.stdout.write(prof.to_csv({k: json.dumps(v, sort_keys=True) for k, v in meta.items()}))
        else:
            write_profile(args.out, prof, meta)
    elif cmd == "spectrum":
        _emit(spectrum_report(_params(args)))
    elif cmd == "evans":
        _emit(evans_report(_params(args), args.lambda_max))
    elif cmd == "simulate":
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise InvalidParameters(f"cannot read config: {exc}") from None
        request = parse_config(text, lenient=args.lenient)
        bundle = run_request(request, args.out)
        _emit(bundle.summary)
    elif cmd == "preset":
        if args.list or args.name is None:
            _emit({name: p.description for name, p in sorted(PRESETS.items())})
            return EXIT_OK
        bundle = run_preset(args.name, args.out)
        _emit({"directory": str(bundle.directory), "checks": bundle.summary["checks"], "passed": bundle.passed})
    elif cmd == "sweep":
        grid = parse_grid(args.grid)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_sweep_point, [args.task] * len(grid), grid))
        else:
            rows = [_sweep_point(args.task, p) for p in grid]
        _emit({"task": args.task, "grid": args.grid, "metadata": metadata(), "points": rows}, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _dispatch(args)
    except (InvalidParameters, NoWaveError, AbsoluteSpectrumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, HydroshockError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
