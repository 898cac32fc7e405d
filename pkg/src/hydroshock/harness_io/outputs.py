"""Writers for CSV and JSON artifacts, all carrying a metadata header."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from ..wave_family import WaveParams


def versions() -> dict:
    import numba
    import scipy

    from .. import __version__

    return {
        "hydroshock": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


def metadata(params: Optional[WaveParams] = None, **extra) -> dict:
    meta = {"versions": versions()}
    if params is not None:
        meta["params"] = {"h_left": params.h_left, "h_right": params.h_right, "froude": params.froude}
    meta.update(extra)
    return meta


def jsonable(obj):
    """Recursively convert numpy, enum and dataclass values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _header(meta: dict) -> str:
    lines = []
    for key in sorted(meta):
        value = meta[key]
        text = json.dumps(jsonable(value), sort_keys=True) if isinstance(value, (dict, list, tuple)) else value
        lines.append(f"# {key}: {text}")
    return "\n".join(lines) + "\n" if lines else ""


def write_csv(path: Path, columns: dict, meta: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w") as fh:
        fh.write(_header(meta or {}))
        np.savetxt(fh, data, delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    return path


def read_csv(path: Path) -> tuple[dict, dict]:
    """Inverse of :func:`write_csv`: returns ``(metadata_lines, columns)``."""
    meta = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        key, _, value = lines[k][2:].partition(": ")
        meta[key] = value
        k += 1
    names = lines[k].split(",")
    body = np.loadtxt(lines[k + 1:], delimiter=",", ndmin=2)
    return meta, {n: body[:, j] for j, n in enumerate(names)}
