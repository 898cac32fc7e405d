"""Named experiments: parameter sets, module targets and run settings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidParameters
from ..wave_family import WaveParams

# Froude numbers quoted in closed form
F_RIEMANN_07 = math.sqrt(85) / 10 + math.sqrt(238) / 14
F_RIEMANN_04 = math.sqrt(7) / 2 + math.sqrt(7 / 10)

TARGETS = ("profile", "spectrum", "evans", "simulate")


@dataclass(frozen=True)
class ExperimentPreset:
    """One reproducible experiment.

    ``parameter_sets`` holds every ``(H_L, H_R, F)`` the preset touches; the
    first one is the preset's default for single-wave requests.  ``simulation``
    lists overrides of the default run settings and is empty for presets that
    do not evolve anything.
    """

    name: str
    parameter_sets: tuple[WaveParams, ...]
    targets: tuple[str, ...]
    outcome: str
    description: str
    simulation: dict = field(default_factory=dict)
    expected_classes: tuple[str, ...] = ()

    @property
    def params(self) -> WaveParams:
        return self.parameter_sets[0]

    @property
    def task(self) -> str:
        return "simulate" if "simulate" in self.targets else self.targets[0]


def _p(hl, hr, f):
    return WaveParams(hl, hr, f)


_FIG1 = (
    _p(1, 1.3, 3),
    _p(1, 0.4, 3),
    _p(1, 0.4, F_RIEMANN_04),
    _p(1, 0.2, 1.5),
    _p(1, 0.8, 1.5),
)

_ACCEPTANCE_RUN = {"domain": [-100.0, 300.0], "n_cells": 8000, "cfl": 0.45, "second_order": True}

PRESETS: dict[str, ExperimentPreset] = {
    p.name: p
    for p in (
        ExperimentPreset(
            "profiles_fig1",
            _FIG1,
            ("profile",),
            "profiles",
            "one profile of each existence class",
            expected_classes=("i", "ii", "iii", "iv", "v"),
        ),
        ExperimentPreset(
            "window_fig4",
            (_p(1, 0.25, 3),),
            ("spectrum",),
            "window",
            "weight window of the left endstate, expected (3, 5)",
        ),
        ExperimentPreset(
            "fig4",
            (_p(1, 0.25, 3),),
            ("spectrum",),
            "window",
            "alias of window_fig4",
        ),
        ExperimentPreset(
            "fig_stable_ii",
            (_p(1, 0.7, 2.28),),
            ("evans", "simulate"),
            "spectrally_stable",
            "convectively stable type (ii) wave: point spectrum and an early-time run",
            simulation={**_ACCEPTANCE_RUN, "t_end": 100.0, "output_stride": 10.0},
        ),
        ExperimentPreset(
            "stable_2p28",
            (_p(1, 0.7, 2.28),),
            ("simulate",),
            "converges",
            "perturbed dambreak relaxing onto the nonmonotone discontinuous wave",
            simulation={**_ACCEPTANCE_RUN, "t_end": 1500.0, "output_stride": 25.0, "splitting": "strang"},
        ),
        ExperimentPreset(
            "abs_2p30",
            (_p(1, 0.7, 2.30),),
            ("simulate",),
            "invading_front",
            "absolutely unstable left state invaded by roll waves",
            simulation={**_ACCEPTANCE_RUN, "t_end": 2000.0, "output_stride": 10.0, "splitting": "strang"},
        ),
        ExperimentPreset(
            "riemann_iii",
            (_p(1, 0.7, F_RIEMANN_07),),
            ("evans", "simulate"),
            "converges",
            "Riemann shock: point spectrum and relaxation of the perturbed dambreak",
            simulation={**_ACCEPTANCE_RUN, "t_end": 100.0, "output_stride": 5.0},
        ),
        ExperimentPreset(
            "stable_iv",
            (_p(1, 0.2, 1.5),),
            ("profile", "spectrum", "evans"),
            "spectrally_stable",
            "decreasing discontinuous wave below F = 2",
        ),
        ExperimentPreset(
            "reverse_front",
            (_p(1, 1.3, 3),),
            ("simulate",),
            "invading_back",
            "increasing smooth wave invaded by roll waves",
            simulation={**_ACCEPTANCE_RUN, "t_end": 100.0, "output_stride": 0.5, "splitting": "strang"},
        ),
    )
}

DEFAULT_PRESET = "fig_stable_ii"


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameters(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None


def preset_defaults(name: str, base_simulation: Optional[dict] = None) -> dict:
    """Fully explicit request document for ``name`` (before user overrides)."""
    preset = get_preset(name)
    p = preset.params
    sim = dict(base_simulation or {})
    sim.update(preset.simulation)
    return {
        "preset": preset.name,
        "task": preset.task,
        "params": {"h_left": p.h_left, "h_right": p.h_right, "froude": p.froude},
        "simulation": sim,
    }
