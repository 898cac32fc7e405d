import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import linregress

from hydroshock.errors import BlowUp, InvalidParameters, NoPeriodicSegment, PositivityFailure
from hydroshock.simulator import (
    ProfileDistance,
    SimConfig,
    SimState,
    Stepper,
    bump,
    fit_front_speed,
    flux,
    flux_jacobian,
    ic_dambreak,
    integrate,
    periodic_segment,
    roll_constraint_residual,
    shock_census,
    source,
    step,
    wave_speeds,
)
from hydroshock.wave_family import WaveParams, derive, threshold_table

STABLE = WaveParams(1, 0.7, 2.28)
FLAT = WaveParams(1, 1.0000001, 2.28)


def test_flux_examples():
    f0, f1 = flux(2.0, 0.0, 2.0)
    assert (f0, f1) == (0.0, 0.5)
    h = 1.7
    f0, f1 = flux(h, h**1.5, 3.0)
    assert f0 == pytest.approx(h**1.5, rel=1e-15)
    assert f1 == pytest.approx(h * h + h * h / 18.0, rel=1e-15)
    with pytest.raises(InvalidParameters):
        flux(0.0, 1.0, 2.0)


def test_source_examples():
    h = 1.3
    assert source(h, h**1.5)[1] == pytest.approx(0.0, abs=1e-15)
    assert source(1.0, 0.0)[1] == 1.0
    assert source(1.0, 1.2)[1] < 0
    with pytest.raises(InvalidParameters):
        source(-1.0, 0.0)


@settings(max_examples=50)
@given(st.floats(0.05, 5.0), st.floats(-5.0, 5.0), st.floats(0.3, 5.0))
def test_wave_speeds_are_jacobian_eigenvalues(h, q, froude):
    lo, hi = wave_speeds(h, q, froude)
    eig = np.sort(np.linalg.eigvals(flux_jacobian(h, q, froude)).real)
    assert eig == pytest.approx([lo, hi], rel=1e-10, abs=1e-12)


def test_dambreak_initial_data():
    h, q = ic_dambreak(1.0, 0.7, np.array([-5.0, -4.3, 0.1]))
    assert h[0] == pytest.approx(1 + math.exp(-2), rel=1e-15)
    assert h[1] == 1.0
    assert (h[2], q[2]) == (0.7, 0.7**1.5)
    assert q[0] == q[1] == 1.0
    assert bump(np.array([-5 + math.sqrt(0.5)]))[0] == 0.0


def test_config_validation():
    with pytest.raises(InvalidParameters):
        SimConfig(STABLE, domain=(1.0, 0.0))
    with pytest.raises(InvalidParameters):
        SimConfig(STABLE, n_cells=8)
    with pytest.raises(InvalidParameters):
        SimConfig(STABLE, cfl=1.2)


def _flat_config(n=64, **kw):
    # outflow ghosts: the fixed right endstate of FLAT is not exactly 1
    kw.setdefault("bc", "outflow")
    return SimConfig(FLAT, domain=(-10.0, 10.0), n_cells=n, **kw)


def test_equilibrium_is_a_fixed_point_per_step():
    cfg = _flat_config()
    state = SimState(np.ones(64), np.ones(64))
    out = step(state, cfg)
    assert np.max(np.abs(out.h - 1.0)) <= 1e-14
    assert np.max(np.abs(out.q - 1.0)) <= 1e-14


def test_equilibrium_drift_over_many_steps():
    cfg = _flat_config(splitting="strang")
    h0 = 1.0
    stepper = Stepper(cfg, SimState(np.full(64, h0), np.full(64, h0**1.5)), cfg.centers(), 1.3)
    dt = stepper.stable_dt()
    for _ in range(10_000):
        stepper.advance(dt)
    h, q = stepper.interior
    assert max(np.max(np.abs(h - h0)), np.max(np.abs(q - h0**1.5))) < 1e-12


def test_mass_balance_per_step():
    cfg = SimConfig(STABLE, domain=(-20.0, 20.0), n_cells=800, t_end=20.0, output_stride=5.0)
    tr = integrate(cfg)
    assert tr.mass_residual_max < 1e-10


def test_first_order_domain_of_dependence():
    cfg = _flat_config(n=101, second_order=False)
    h = np.ones(101)
    h[50] += 0.1
    stepper = Stepper(cfg, SimState(h, np.ones(101)), cfg.centers(), 0.0)
    for k in range(1, 6):
        stepper.advance(stepper.stable_dt())
        changed = np.flatnonzero(np.abs(stepper.interior[0] - 1.0) > 0)
        assert changed.min() >= 50 - k and changed.max() <= 50 + k


def test_second_order_convergence_on_smooth_data():
    x0, length = -20.0, 40.0

    def solve(n):
        xs = x0 + (np.arange(n) + 0.5) * length / n
        cfg = SimConfig(
            FLAT, domain=(x0, x0 + length), n_cells=n, t_end=2.0, output_stride=2.0, ic="custom",
            custom_h=1 + 0.1 * np.exp(-xs**2), custom_q=np.ones(n), splitting="strang", frame_speed=0.0,
        )
        return integrate(cfg).h[-1]

    sols = [solve(n) for n in (400, 800, 1600, 3200)]
    errs = [np.sum(np.abs(0.5 * (f[0::2] + f[1::2]) - c)) * length / c.size for c, f in zip(sols, sols[1:])]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders[-1] > 1.75
    assert orders[-1] > orders[0]


def test_positivity_failure_reports_location():
    n = 64
    h = np.ones(n)
    h[40] = 1e-12
    cfg = _flat_config(n=n, ic="custom", custom_h=h, custom_q=h**1.5, frame_speed=0.0)
    with pytest.raises(PositivityFailure) as err:
        step(SimState(h, h**1.5), cfg, dt=1e-15)
    assert err.value.location == pytest.approx(cfg.centers()[40])
    assert err.value.time == pytest.approx(1e-15)


def test_blowup_reported_with_time():
    n = 64
    q = np.ones(n)
    q[30] = 2e6
    cfg = _flat_config(n=n, ic="custom", custom_h=np.ones(n), custom_q=q, t_end=1.0, frame_speed=0.0)
    with pytest.raises(BlowUp) as err:
        integrate(cfg)
    assert err.value.time > 0


def test_frame_independence():
    diffs = []
    for n in (600, 1200):
        base = SimConfig(STABLE, domain=(-30.0, 30.0), n_cells=n, t_end=20.0, output_stride=10.0)
        a = integrate(base)
        b = integrate(SimConfig(**{**base.__dict__, "solve_in_frame": False}))
        diffs.append(np.sum(np.abs(a.h[-1] - b.h[-1])) * base.dx)
    assert diffs[1] < 0.1
    assert diffs[1] < 0.75 * diffs[0]


def test_riemann_shock_travels_at_wave_speed():
    p = WaveParams(1, 0.7, threshold_table(0.7).riemann)
    cfg = SimConfig(p, domain=(-20.0, 100.0), n_cells=2400, t_end=50.0, output_stride=5.0, frame_speed=0.0, ic="dambreak")
    tr = integrate(cfg)
    pos = [shock_census(tr.xi, h, 0.075)[-1] for h in tr.h]
    slope = linregress(tr.times, pos).slope
    assert abs(slope - derive(p).speed_c) < cfg.dx


def test_shock_census_merges_close_flags():
    xi = np.arange(20) * 0.1
    h = np.ones(20)
    h[10:] = 0.5
    h[9] = 0.8
    assert shock_census(xi, h, 0.1).size == 1
    h2 = h.copy()
    h2[15:] = 0.2
    assert shock_census(xi, h2, 0.1).size == 2
    assert shock_census(xi, np.ones(20), 0.1).size == 0


def test_periodic_segment_detection():
    shocks = np.array([-30.0, -20.0, -12.0, -11.0, -10.05, -9.0, -8.0, -3.0])
    seg = periodic_segment(shocks)
    assert seg[0] == -12.0 and seg[-1] == -8.0
    assert periodic_segment(np.array([0.0, 1.0, 5.0])).size == 0


def test_profile_distance_recovers_shift():
    xi = -30 + 0.025 + 0.05 * np.arange(1200)
    pd = ProfileDistance(STABLE, xi)
    exact = pd.profile.h_at(xi - 0.3)
    exact[xi - 0.3 > 0] = STABLE.h_right
    fit = pd.fit(exact)
    assert fit.local_min_ok
    assert abs(fit.shift - 0.3) <= 0.05
    assert fit.distance < 0.05 * pd(exact, 0.0 + 2.0)


@pytest.fixture(scope="module")
def decaying_run():
    p = WaveParams(1, 0.7, 2.2)
    cfg = SimConfig(p, domain=(-40.0, 40.0), n_cells=1600, t_end=200.0, output_stride=5.0)
    return integrate(cfg)


def test_stable_run_has_no_front(decaying_run):
    assert fit_front_speed(decaying_run, 0.05) is None


def test_stable_run_has_no_roll_segment(decaying_run):
    with pytest.raises(NoPeriodicSegment):
        roll_constraint_residual(decaying_run)


def test_stable_run_settles_to_single_shock(decaying_run):
    thr = 0.25 * 0.3
    assert shock_census(decaying_run.xi, decaying_run.h[-1], thr).size == 1
