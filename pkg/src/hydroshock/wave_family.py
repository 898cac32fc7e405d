"""Wave parameters, closed-form derived scalars and the two classifications.

Everything here is a pure function of ``(H_L, H_R, F)``.  Derived quantities
are evaluated in the form parametrized by ``nu = sqrt(H_L / H_R)`` so that
nothing cancels when ``nu`` is close to one.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import NamedTuple

from .errors import InvalidParameters

TIE_TOL = 1e-12
RIEMANN_REL_TOL = 1e-9


class ProfileClass(Enum):
    INCREASING_SMOOTH = "increasing_smooth"
    NONMONOTONE_DISCONTINUOUS = "nonmonotone_discontinuous"
    RIEMANN_SHOCK = "riemann_shock"
    DECREASING_DISCONTINUOUS = "decreasing_discontinuous"
    SMOOTH_DECREASING = "smooth_decreasing"
    NO_WAVE = "no_wave"
    ROLL_WAVE_BOUNDARY = "roll_wave_boundary"
    REVERSE_ONLY = "reverse_only"

    @property
    def roman(self) -> str | None:
        return _ROMAN.get(self)

    @property
    def exists(self) -> bool:
        return self in _ROMAN

    @property
    def discontinuous(self) -> bool:
        return self in (
            ProfileClass.NONMONOTONE_DISCONTINUOUS,
            ProfileClass.RIEMANN_SHOCK,
            ProfileClass.DECREASING_DISCONTINUOUS,
        )

    @property
    def smooth(self) -> bool:
        return self in (ProfileClass.INCREASING_SMOOTH, ProfileClass.SMOOTH_DECREASING)


_ROMAN = {
    ProfileClass.INCREASING_SMOOTH: "i",
    ProfileClass.NONMONOTONE_DISCONTINUOUS: "ii",
    ProfileClass.RIEMANN_SHOCK: "iii",
    ProfileClass.DECREASING_DISCONTINUOUS: "iv",
    ProfileClass.SMOOTH_DECREASING: "v",
}


class StabilityRegion(Enum):
    STAB = "stab"
    CONV = "conv"
    ABS = "abs"
    BOUNDARY = "boundary"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class WaveParams:
    """Endstate heights and Froude number of a hydraulic shock."""

    h_left: float
    h_right: float
    froude: float

    def __post_init__(self):
        for name in ("h_left", "h_right", "froude"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParameters(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidParameters(f"{name} must be finite and positive, got {value!r}")
            object.__setattr__(self, name, value)
        if math.isclose(self.h_left, self.h_right, rel_tol=1e-14, abs_tol=0.0):
            raise InvalidParameters("h_left == h_right: no non-constant wave connects equal heights")

    @property
    def nu(self) -> float:
        return math.sqrt(self.h_left / self.h_right)

    @property
    def h_ratio(self) -> float:
        return self.h_right / self.h_left


@dataclass(frozen=True)
class DerivedScalars:
    """Closed-form quantities attached to a wave.

    ``a_left``/``a_right`` are values of the characteristic determinant
    ``a(h) = h/F**2 - q0**2/h**2`` at the endstates; ``a`` vanishes exactly
    at the sonic height ``h_s``.
    """

    params: WaveParams
    nu: float
    speed_c: float
    q0: float
    h_s: float
    h_out: float
    h_star: float
    a_left: float
    a_right: float

    @property
    def froude(self) -> float:
        return self.params.froude

    @property
    def h_left(self) -> float:
        return self.params.h_left

    @property
    def h_right(self) -> float:
        return self.params.h_right

    def char_det(self, h):
        """Characteristic determinant ``a(h)``; works on arrays."""
        return h / self.froude**2 - self.q0**2 / h**2

    def flux_at(self, h):
        """Flow rate along the profile, ``Q = c H - q0``."""
        return self.speed_c * h - self.q0


def derive(params: WaveParams) -> DerivedScalars:
    hr = params.h_right
    f = params.froude
    nu = params.nu
    sqrt_hr = math.sqrt(hr)
    speed_c = (nu * nu + nu + 1.0) / (nu + 1.0) * sqrt_hr
    q0 = nu * nu / (nu + 1.0) * hr * sqrt_hr
    h_s = (f * nu * nu / (nu + 1.0)) ** (2.0 / 3.0) * hr
    h_out = nu * nu / (nu + 1.0) ** 2 * hr
    # positive root of h**2 + hr*h - 2 h_s**3/hr = 0, rationalized
    disc = math.sqrt(8.0 * f * f * nu**4 + (nu + 1.0) ** 2)
    h_star = 4.0 * f * f * nu**4 * hr / ((nu + 1.0) * (disc + nu + 1.0))

    def a(h):
        return h / f**2 - q0**2 / h**2

    return DerivedScalars(
        params=params,
        nu=nu,
        speed_c=speed_c,
        q0=q0,
        h_s=h_s,
        h_out=h_out,
        h_star=h_star,
        a_left=a(params.h_left),
        a_right=a(params.h_right),
    )


@dataclass(frozen=True)
class ThresholdTable:
    """Critical Froude numbers for a height ratio.

    Values are evaluated at ``nu0 = sqrt(H_max / H_min) > 1``; for
    ``h_ratio > 1`` the ``roll_wave`` entry is the onset of increasing smooth
    (reverse) profiles.
    """

    h_ratio: float
    nu: float
    nu0: float
    no_wave: float
    riemann: float
    absolute: float
    roll_wave: float

    @property
    def type_ii_window(self) -> tuple[float, float]:
        return (self.riemann, self.roll_wave)

    @property
    def reverse_threshold(self) -> float:
        return self.roll_wave

    def as_dict(self) -> dict:
        return asdict(self)


def _thresholds(nu0: float) -> tuple[float, float, float, float]:
    no_wave = (nu0 + 1.0) / nu0**2
    riemann = (nu0 + 1.0) * math.sqrt(2.0 * (nu0 * nu0 + 1.0)) / (2.0 * nu0)
    absolute = math.sqrt(2.0 * nu0 * (nu0 + 1.0))
    roll_wave = nu0 * (nu0 + 1.0)
    return no_wave, riemann, absolute, roll_wave


def threshold_table(h_ratio: float) -> ThresholdTable:
    h_ratio = float(h_ratio)
    if not math.isfinite(h_ratio) or h_ratio <= 0.0:
        raise InvalidParameters(f"h_ratio must be finite and positive, got {h_ratio!r}")
    if h_ratio == 1.0:
        raise InvalidParameters("h_ratio = 1 has no non-constant wave")
    nu = math.sqrt(1.0 / h_ratio)
    nu0 = nu if nu > 1.0 else 1.0 / nu
    return ThresholdTable(h_ratio, nu, nu0, *_thresholds(nu0))


def _near(a: float, b: float, tol: float = TIE_TOL) -> bool:
    return abs(a - b) <= tol


def classify_existence(params: WaveParams) -> ProfileClass:
    """Existence class from the nu-F inequalities, cross-checked on heights."""
    result = _classify_by_nu_froude(params)
    if result.exists and result is not ProfileClass.RIEMANN_SHOCK:
        by_order = classify_by_ordering(derive(params))
        if by_order is not result and not _close_to_threshold(params):
            raise AssertionError(
                f"classification mismatch for {params}: nu-F gives {result}, ordering gives {by_order}"
            )
    return result


def _classify_by_nu_froude(params: WaveParams) -> ProfileClass:
    f = params.froude
    nu = params.nu
    if nu < 1.0:
        boundary = (nu + 1.0) / nu**2  # equals nu0 (nu0 + 1) with nu0 = 1/nu
        if _near(f, boundary):
            return ProfileClass.ROLL_WAVE_BOUNDARY
        return ProfileClass.INCREASING_SMOOTH if f > boundary else ProfileClass.REVERSE_ONLY
    no_wave, riemann, _, roll_wave = _thresholds(nu)
    if _near(f, roll_wave):
        return ProfileClass.ROLL_WAVE_BOUNDARY
    if f > roll_wave:
        return ProfileClass.NO_WAVE
    if abs(f - riemann) <= RIEMANN_REL_TOL * f:
        return ProfileClass.RIEMANN_SHOCK
    if _near(f, no_wave):
        return ProfileClass.NO_WAVE
    if f > riemann:
        return ProfileClass.NONMONOTONE_DISCONTINUOUS
    if f > no_wave:
        return ProfileClass.DECREASING_DISCONTINUOUS
    return ProfileClass.SMOOTH_DECREASING


def classify_by_ordering(derived: DerivedScalars) -> ProfileClass:
    """Existence class read off the ordering of ``H_L, H_R, H_s, H_*``."""
    hl, hr, hs, hst = derived.h_left, derived.h_right, derived.h_s, derived.h_star
    if hl < hr:
        return ProfileClass.INCREASING_SMOOTH if hr < hs else ProfileClass.REVERSE_ONLY
    if hs < hr:
        return ProfileClass.SMOOTH_DECREASING
    if hs >= hl:
        return ProfileClass.NO_WAVE
    if hst > hl:
        return ProfileClass.NONMONOTONE_DISCONTINUOUS
    if hst < hl:
        return ProfileClass.DECREASING_DISCONTINUOUS
    return ProfileClass.RIEMANN_SHOCK


def _close_to_threshold(params: WaveParams, rel: float = 1e-9) -> bool:
    nu0 = params.nu if params.nu > 1.0 else 1.0 / params.nu
    return any(abs(params.froude - t) <= rel * t for t in _thresholds(nu0))


def classify_stability(params: WaveParams) -> StabilityRegion:
    f = params.froude
    nu = params.nu
    if nu < 1.0:
        boundary = (nu + 1.0) / nu**2
        if f > boundary and not _near(f, boundary):
            return StabilityRegion.ABS
        return StabilityRegion.NOT_APPLICABLE
    no_wave, _, absolute, roll_wave = _thresholds(nu)
    if f > roll_wave or _near(f, roll_wave):
        return StabilityRegion.NOT_APPLICABLE
    if _near(f, absolute):
        return StabilityRegion.BOUNDARY
    if f > absolute:
        return StabilityRegion.ABS
    if f >= 2.0 or _near(f, 2.0):
        return StabilityRegion.CONV
    if _near(f, no_wave):
        return StabilityRegion.NOT_APPLICABLE
    return StabilityRegion.STAB


class SpreadingSpeed(NamedTuple):
    s_abs: float
    relative: float  # s_abs - speed_c, the slope seen in the comoving frame


def spreading_speed(params: WaveParams) -> SpreadingSpeed:
    s_abs = math.sqrt(params.h_left) * (1.0 + 2.0 / params.froude**2)
    return SpreadingSpeed(s_abs, s_abs - derive(params).speed_c)


def summary(params: WaveParams) -> dict:
    """Flat dictionary used by the ``classify`` CLI and the presets."""
    d = derive(params)
    table = threshold_table(params.h_ratio)
    return {
        "h_left": params.h_left,
        "h_right": params.h_right,
        "froude": params.froude,
        "nu": d.nu,
        "c": d.speed_c,
        "q0": d.q0,
        "h_s": d.h_s,
        "h_out": d.h_out,
        "h_star": d.h_star,
        "a_left": d.a_left,
        "a_right": d.a_right,
        "profile_type": classify_existence(params).value,
        "region": classify_stability(params).value,
        "thresholds": {
            "no_wave": table.no_wave,
            "riemann": table.riemann,
            "absolute": table.absolute,
            "roll_wave": table.roll_wave,
        },
        "s_abs": spreading_speed(params).s_abs,
    }
