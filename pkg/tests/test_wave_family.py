import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroshock.errors import InvalidParameters
from hydroshock.wave_family import (
    ProfileClass,
    StabilityRegion,
    WaveParams,
    classify_by_ordering,
    classify_existence,
    classify_stability,
    derive,
    spreading_speed,
    summary,
    threshold_table,
)

F_RIEMANN_07 = math.sqrt(85) / 10 + math.sqrt(238) / 14

heights = st.floats(0.05, 20.0)
froudes = st.floats(0.05, 20.0)


def _params(hl, hr, f):
    if math.isclose(hl, hr, rel_tol=1e-6):
        hr = hl * 1.5
    return WaveParams(hl, hr, f)


def test_speed_c_matches_reported_value():
    assert derive(WaveParams(1, 0.7, 2.0)).speed_c == pytest.approx(1.3811, abs=1e-4)


def test_quarter_case_scalars():
    d = derive(WaveParams(1, 0.25, 3))
    assert d.q0 == pytest.approx(1 / 6, rel=1e-14)
    assert d.h_s == pytest.approx(0.5 ** (2 / 3), rel=1e-14)
    assert d.h_s**3 == pytest.approx(9 * d.q0**2, rel=1e-13)


def test_case_ii_ordering_for_convective_example():
    d = derive(WaveParams(1, 0.7, 2.28))
    assert d.h_s == pytest.approx(0.9106, abs=1e-4)
    assert d.h_star == pytest.approx(1.1600, abs=1e-4)
    assert d.h_right < d.h_s < d.h_left < d.h_star


def test_closed_forms_against_direct_formulas():
    hl, hr, f = 1.7, 0.45, 2.6
    d = derive(WaveParams(hl, hr, f))
    c = (hl + math.sqrt(hl * hr) + hr) / (math.sqrt(hl) + math.sqrt(hr))
    q0 = hl * hr / (math.sqrt(hl) + math.sqrt(hr))
    hs = (q0 * f) ** (2 / 3)
    assert d.speed_c == pytest.approx(c, rel=1e-14)
    assert d.q0 == pytest.approx(q0, rel=1e-14)
    assert d.h_s == pytest.approx(hs, rel=1e-14)
    assert d.h_star == pytest.approx(math.sqrt(2 * hs**3 / hr + hr**2 / 4) - hr / 2, rel=1e-12)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, 1), (1, 0.5, float("nan")), (1, float("inf"), 2), (1, 0.5, 0)])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(InvalidParameters):
        WaveParams(*bad)


@given(heights, heights, froudes)
def test_h_out_below_flux_ratio_below_min_height(hl, hr, f):
    d = derive(_params(hl, hr, f))
    ratio = d.q0 / d.speed_c
    assert d.h_out < ratio * (1 + 1e-12)
    assert ratio < min(d.h_left, d.h_right) * (1 + 1e-12)


@given(heights, heights, froudes)
def test_characteristic_determinant_sign(hl, hr, f):
    d = derive(_params(hl, hr, f))
    hs = np.geomspace(d.h_s / 10, 10 * d.h_s, 101)
    hs = hs[np.abs(hs - d.h_s) > 1e-9 * d.h_s]
    assert np.all(np.sign(d.char_det(hs)) == np.sign(hs - d.h_s))


@given(heights, heights, froudes)
def test_star_above_right_when_sonic_above_right(hl, hr, f):
    d = derive(_params(hl, hr, f))
    if d.h_s > d.h_right:
        assert d.h_star > d.h_right


@pytest.mark.parametrize(
    "params, expected",
    [
        ((1, 0.4, 3), ProfileClass.NONMONOTONE_DISCONTINUOUS),
        ((1, 1.3, 3), ProfileClass.INCREASING_SMOOTH),
        ((1, 0.2, 1.5), ProfileClass.DECREASING_DISCONTINUOUS),
        ((1, 0.8, 1.5), ProfileClass.SMOOTH_DECREASING),
        ((1, 0.7, F_RIEMANN_07), ProfileClass.RIEMANN_SHOCK),
        ((1, 0.7, 3.0), ProfileClass.NO_WAVE),
        ((1, 1.3, 2.0), ProfileClass.REVERSE_ONLY),
    ],
)
def test_existence_examples(params, expected):
    assert classify_existence(WaveParams(*params)) is expected


def test_roll_wave_boundaries():
    nu = math.sqrt(1 / 0.7)
    assert classify_existence(WaveParams(1, 0.7, nu * (nu + 1))) is ProfileClass.ROLL_WAVE_BOUNDARY
    t = threshold_table(1.3)
    assert classify_existence(WaveParams(1, 1.3, t.roll_wave)) is ProfileClass.ROLL_WAVE_BOUNDARY


def test_existence_classifications_agree_on_grid():
    nus = np.linspace(1.02, 4.0, 200)
    fs = np.linspace(0.1, 25.0, 200)
    for nu in nus:
        for f in fs:
            p = WaveParams(nu * nu, 1.0, f)
            kind = classify_existence(p)
            if kind.exists and kind is not ProfileClass.RIEMANN_SHOCK:
                assert classify_by_ordering(derive(p)) is kind


def test_threshold_values():
    t = threshold_table(0.7)
    assert t.riemann == pytest.approx(2.02390, abs=1e-4)
    assert t.absolute == pytest.approx(2.29076, abs=1e-4)
    assert t.roll_wave == pytest.approx(2.62380, abs=1e-4)
    assert threshold_table(1.3).roll_wave == pytest.approx(2.44017, abs=1e-4)
    assert t.riemann == pytest.approx(F_RIEMANN_07, rel=1e-14)


def test_threshold_rejects_unit_ratio():
    with pytest.raises(InvalidParameters):
        threshold_table(1.0)


@given(st.floats(1.0001, 50.0))
def test_thresholds_ordered(nu):
    t = threshold_table(1 / nu**2)
    assert t.no_wave < t.riemann < t.absolute < t.roll_wave


@pytest.mark.parametrize(
    "params, region",
    [
        ((1, 0.7, 2.28), StabilityRegion.CONV),
        ((1, 0.7, 2.30), StabilityRegion.ABS),
        ((1, 0.7, 1.0), StabilityRegion.STAB),
        ((1, 0.7, 2.0), StabilityRegion.CONV),
        ((1, 1.3, 3.0), StabilityRegion.ABS),
        ((1, 0.7, 3.0), StabilityRegion.NOT_APPLICABLE),
    ],
)
def test_stability_examples(params, region):
    assert classify_stability(WaveParams(*params)) is region


def test_stability_on_absolute_threshold_is_boundary():
    assert classify_stability(WaveParams(1, 0.7, threshold_table(0.7).absolute)) is StabilityRegion.BOUNDARY


@settings(max_examples=300)
@given(st.floats(1.01, 5.0), st.floats(0.1, 30.0))
def test_region_implies_existence_class(nu, f):
    p = WaveParams(nu * nu, 1.0, f)
    region = classify_stability(p)
    kind = classify_existence(p)
    if region is StabilityRegion.CONV:
        assert kind.roman in ("ii", "iii", "iv")
    if region is StabilityRegion.STAB:
        assert kind.roman in ("iv", "v")


def test_spreading_speeds():
    assert spreading_speed(WaveParams(1, 0.7, 2.30)).relative == pytest.approx(-0.00305, abs=1e-4)
    assert spreading_speed(WaveParams(1, 1.3, 3)).relative == pytest.approx(-0.3852, abs=1e-4)
    assert spreading_speed(WaveParams(4, 1, 2.5)).s_abs == pytest.approx(2 * (1 + 2 / 2.5**2), rel=1e-15)


def test_summary_keys():
    s = summary(WaveParams(1, 0.7, 2.28))
    for key in ("nu", "c", "q0", "h_s", "h_out", "h_star", "region", "profile_type", "thresholds"):
        assert key in s
    assert s["region"] == "conv"
