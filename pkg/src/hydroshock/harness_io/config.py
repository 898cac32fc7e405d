"""JSON run requests: strict schema, preset defaults and normalization."""

from __future__ import annotations

import copy
import json
import math
import warnings
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import InvalidParameters
from ..simulator import SimConfig
from ..wave_family import WaveParams
from .presets import DEFAULT_PRESET, preset_defaults


class ConfigError(InvalidParameters):
    """Schema violation; ``errors`` holds ``(path, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, allow_inf_nan=False, frozen=True)


class ParamsSpec(_Strict):
    h_left: float = Field(gt=0)
    h_right: float = Field(gt=0)
    froude: float = Field(gt=0)

    @model_validator(mode="after")
    def _distinct(self):
        WaveParams(self.h_left, self.h_right, self.froude)
        return self

    def wave(self) -> WaveParams:
        return WaveParams(self.h_left, self.h_right, self.froude)


class SimulationSpec(_Strict):
    domain: list[float] = Field(default=[-100.0, 300.0], min_length=2, max_length=2)
    n_cells: int = Field(default=8000, gt=15)
    cfl: float = Field(default=0.45, gt=0, lt=1)
    t_end: float = Field(default=100.0, ge=0)
    output_stride: float = Field(default=1.0, gt=0)
    ic: Literal["dambreak_bump", "dambreak", "profile_plus_perturbation"] = "dambreak_bump"
    bc: Literal["fixed_equilibrium", "outflow"] = "fixed_equilibrium"
    frame_speed: Optional[float] = None
    second_order: bool = True
    splitting: Literal["godunov", "strang"] = "godunov"
    solve_in_frame: bool = True
    perturbation_amplitude: float = 1.0

    @field_validator("domain")
    @classmethod
    def _ordered(cls, v):
        if not v[0] < v[1]:
            raise ValueError("domain must be [x_min, x_max] with x_min < x_max")
        return v


class OutputSpec(_Strict):
    directory: Optional[str] = None
    frame_every: int = Field(default=1, ge=1)
    spacetime_every: int = Field(default=10, ge=1)
    write_frames: bool = True


class RunRequest(_Strict):
    preset: str = DEFAULT_PRESET
    task: Literal["classify", "profile", "spectrum", "evans", "simulate"] = "simulate"
    params: ParamsSpec
    simulation: SimulationSpec = SimulationSpec()
    output: OutputSpec = OutputSpec()

    def wave(self) -> WaveParams:
        return self.params.wave()

    def sim_config(self) -> SimConfig:
        s = self.simulation
        return SimConfig(
            self.wave(),
            domain=tuple(s.domain),
            n_cells=s.n_cells,
            cfl=s.cfl,
            t_end=s.t_end,
            output_stride=s.output_stride,
            ic=s.ic,
            bc=s.bc,
            frame_speed=s.frame_speed,
            second_order=s.second_order,
            splitting=s.splitting,
            solve_in_frame=s.solve_in_frame,
            perturbation_amplitude=s.perturbation_amplitude,
        )


def _reject_constant(name):
    raise ConfigError([("<document>", f"non-finite number {name} is not allowed")])


def _finite_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ConfigError([("<document>", f"number {text} overflows to infinity")])
    return value


def _loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant, parse_float=_finite_float)
    except json.JSONDecodeError as exc:
        raise ConfigError([("<document>", f"malformed JSON: {exc}")]) from None


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _path(loc) -> str:
    return ".".join(str(part) for part in loc) or "<document>"


def _drop(doc: dict, loc) -> None:
    node = doc
    for part in loc[:-1]:
        node = node[part]
    node.pop(loc[-1], None)


def parse_config(text: str, lenient: bool = False) -> RunRequest:
    """Validate a JSON request and fill in every default.

    Missing fields come from the named preset (``fig_stable_ii`` when absent),
    then from the schema.  Unknown keys are errors unless ``lenient`` is set,
    in which case they are dropped with a warning.
    """
    raw = _loads(text)
    if not isinstance(raw, dict):
        raise ConfigError([("<document>", "top level must be a JSON object")])
    name = raw.get("preset", DEFAULT_PRESET)
    if not isinstance(name, str):
        raise ConfigError([("preset", "must be a string")])
    try:
        base = preset_defaults(name)
    except InvalidParameters as exc:
        raise ConfigError([("preset", str(exc))]) from None
    doc = _merge(base, raw)
    for _ in range(2):
        try:
            return RunRequest.model_validate(doc)
        except ValidationError as exc:
            errors = exc.errors()
            extra = [e for e in errors if e["type"] == "extra_forbidden"]
            if not lenient or not extra or len(extra) != len(errors):
                raise ConfigError((_path(e["loc"]), e["msg"]) for e in errors) from None
            for e in extra:
                warnings.warn(f"ignoring unknown key {_path(e['loc'])}", stacklevel=2)
                _drop(doc, e["loc"])
    raise ConfigError([("<document>", "could not normalize the document")])  # pragma: no cover


def serialize(request: RunRequest) -> str:
    """Canonical JSON text: every field explicit, keys sorted."""
    return json.dumps(request.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
