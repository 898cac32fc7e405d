import math

import numpy as np
import pytest
from scipy.integrate import quad

from hydroshock.errors import CharacteristicState, InvalidParameters, NoWaveError
from hydroshock.profile import (
    build_profile,
    decay_rates,
    implicit_oracle,
    profile_rhs,
    rh_residual,
)
from hydroshock.wave_family import ProfileClass, WaveParams, derive, threshold_table

FIG1 = [(1, 0.4, 3), (1, 1.3, 3), (1, 0.2, 1.5), (1, 0.8, 1.5), (1, 0.7, 2.28)]


def test_rhs_roots_and_pole():
    d = derive(WaveParams(1, 0.7, 2.28))
    assert profile_rhs(d.h_left, d) == 0.0
    assert profile_rhs(d.h_out, d) == 0.0
    with pytest.raises(CharacteristicState):
        profile_rhs(d.h_s, d)


def test_rhs_matches_unfactored_form():
    d = derive(WaveParams(1, 0.7, 2.28))
    h = 1.05
    q = d.speed_c * h - d.q0
    # d/dx of the momentum flux balance written on H alone
    unfactored = (h**3 - q * abs(q)) / (h * h * d.char_det(h))
    assert profile_rhs(h, d) == pytest.approx(unfactored, rel=1e-12)


def test_oracle_basic_symmetries():
    d = derive(WaveParams(1, 0.7, 2.28))
    assert implicit_oracle(1.05, 1.05, d) == 0.0
    assert implicit_oracle(1.02, 1.1, d) == pytest.approx(-implicit_oracle(1.1, 1.02, d), rel=1e-15)
    with pytest.raises(InvalidParameters):
        implicit_oracle(0.95, 1.05, d)


def test_oracle_matches_quadrature():
    d = derive(WaveParams(1, 0.7, 2.28))
    val, _ = quad(lambda h: 1.0 / profile_rhs(h, d), 1.02, 1.10, epsabs=1e-14, epsrel=1e-13)
    assert implicit_oracle(1.02, 1.10, d) == pytest.approx(val, rel=1e-10)


def test_rh_residual_cases():
    d = derive(WaveParams(1, 0.7, 2.28))
    assert abs(rh_residual(d.h_star, d.h_right, d)) < 1e-12
    assert rh_residual(d.h_right, d.h_right, d) == 0.0
    f = threshold_table(0.7).riemann
    dr = derive(WaveParams(1, 0.7, f))
    assert abs(rh_residual(dr.h_left, dr.h_right, dr)) < 1e-12


@pytest.mark.parametrize("params", FIG1)
def test_profile_invariants(params):
    p = build_profile(WaveParams(*params), half_length=30.0, n_samples=6001)
    d = p.derived
    assert np.all(np.diff(p.grid) > 0)
    assert 0.0 in p.grid
    assert np.all(p.q_values > 0)
    assert np.all(np.abs(p.h_values - d.h_s) > 0)
    if p.subshock is not None:
        neg = p.grid <= 0
        assert p.h_at(0.0)[0] == pytest.approx(d.h_star, rel=1e-12)
        assert np.all(p.h_values[~neg] == d.h_right)
        assert p.h_at(0.0)[0] > d.h_s > d.h_right
        smooth = p.h_values[neg]
        lo, hi = sorted((d.h_left, d.h_star))
        assert np.all((smooth >= lo) & (smooth <= hi))
        steps = np.diff(smooth)
        assert np.all(steps >= 0) or np.all(steps <= 0)
    else:
        steps = np.diff(p.h_values)
        assert np.all(steps >= 0) or np.all(steps <= 0)
        assert p.h_at(0.0)[0] == pytest.approx(0.5 * (d.h_left + d.h_right), rel=1e-12)


def test_nonmonotone_shape():
    p = build_profile(WaveParams(1, 0.4, 3))
    assert p.profile_type is ProfileClass.NONMONOTONE_DISCONTINUOUS
    neg = p.h_values[p.grid <= 0]
    assert neg[0] == pytest.approx(1.0, abs=1e-6)
    assert neg[-1] == pytest.approx(p.derived.h_star)
    assert p.derived.h_star > 1.0


def test_riemann_profile_piecewise_constant():
    p = build_profile(WaveParams(1, 0.7, threshold_table(0.7).riemann))
    assert p.left is None
    assert set(np.unique(p.h_values)) == {1.0, 0.7}


def test_no_wave_rejected():
    with pytest.raises(NoWaveError):
        build_profile(WaveParams(1, 0.7, 3.0))


@pytest.mark.parametrize("params", FIG1)
def test_profile_matches_oracle(params):
    p = build_profile(WaveParams(*params))
    d = p.derived
    h0 = d.h_star if p.subshock is not None else 0.5 * (d.h_left + d.h_right)
    for frac in (0.1, 0.5, 0.9, 0.999):
        h = d.h_left + frac * (h0 - d.h_left)
        assert p.position_of(h) == pytest.approx(implicit_oracle(h0, h, d), abs=1e-6)


@pytest.mark.parametrize("params", FIG1)
def test_finite_difference_residual_order(params):
    wp = WaveParams(*params)
    probe = np.linspace(-5.5, 5.5, 111)
    probe = probe[np.abs(probe) > 0.5]
    errs = []
    for n in (301, 601, 1201):
        p = build_profile(wp, half_length=6.0, n_samples=n)
        x, h, dx = p.grid, p.h_values, p.dx
        idx = np.searchsorted(x, probe - dx / 2)
        fd = (h[idx + 1] - h[idx - 1]) / (2 * dx)
        errs.append(np.max(np.abs(fd - profile_rhs(h[idx], p.derived))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


@pytest.mark.parametrize("params", FIG1)
def test_tail_slope_matches_decay_rate(params):
    p = build_profile(WaveParams(*params), half_length=60.0)
    eta_l, _ = decay_rates(p.derived)
    assert p.tail_slope() == pytest.approx(eta_l, rel=0.02)


def test_csv_has_double_row_at_subshock():
    p = build_profile(WaveParams(1, 0.7, 2.28), half_length=2.0, n_samples=21)
    text = p.to_csv({"h_left": 1.0})
    lines = text.splitlines()
    assert lines[0] == "# h_left: 1.0"
    assert lines[1] == "x,h,q"
    zero_rows = [ln for ln in lines[2:] if float(ln.split(",")[0]) == 0.0]
    assert len(zero_rows) == 2
    assert zero_rows[0] != zero_rows[1]
