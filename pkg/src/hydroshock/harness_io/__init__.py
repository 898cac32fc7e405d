"""Configuration parsing, experiment presets, artifact writers and the CLI."""

from .checks import Check, census_trend, merge_event
from .config import ConfigError, OutputSpec, ParamsSpec, RunRequest, SimulationSpec, parse_config, serialize
from .presets import DEFAULT_PRESET, PRESETS, ExperimentPreset, get_preset
from .runner import Bundle, classify_report, evans_report, profile_report, run_preset, run_request, spectrum_report

__all__ = [
    "Bundle", "Check", "ConfigError", "DEFAULT_PRESET", "ExperimentPreset", "OutputSpec", "PRESETS",
    "ParamsSpec", "RunRequest", "SimulationSpec", "census_trend", "classify_report", "evans_report",
    "get_preset", "merge_event", "parse_config", "profile_report", "run_preset", "run_request",
    "serialize", "spectrum_report",
]
