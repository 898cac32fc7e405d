import math

import numpy as np
import pytest

from hydroshock.errors import AbsoluteSpectrumError, Inconclusive, InvalidParameters
from hydroshock.pointspec import (
    ZCubic,
    _evaluate_coefficients,
    _notched_rectangle,
    argument_principle,
    b_form_positivity,
    count_unstable,
    decay_exponent_identity,
    evans_residual,
    flux_evans_residual,
    nonreal_bound,
    reduced_coeffs,
)
from hydroshock.profile import build_profile, profile_rhs
from hydroshock.spectrum import absolute_lines
from hydroshock.wave_family import WaveParams, derive, threshold_table

F_RIEMANN = threshold_table(0.7).riemann
CASES = {"conv": (1, 0.7, 2.28), "stab_iv": (1, 0.2, 1.5), "riemann": (1, 0.7, F_RIEMANN)}


@pytest.fixture(scope="module")
def coeffs():
    return {k: reduced_coeffs(build_profile(WaveParams(*p), half_length=40.0, n_samples=8001)) for k, p in CASES.items()}


def test_smooth_profiles_rejected():
    with pytest.raises(InvalidParameters):
        reduced_coeffs(build_profile(WaveParams(1, 0.8, 1.5)))


def test_riemann_constants(coeffs):
    c = coeffs["riemann"]
    assert np.ptp(c.f2) == 0.0
    assert c.f2[0] < 0
    assert c.c2 == pytest.approx(0.5 * c.f2[0], rel=1e-14)


@pytest.mark.parametrize("case", list(CASES))
def test_c2_forms_agree(coeffs, case):
    c = coeffs[case]
    assert c.c2_jump_form() == pytest.approx(c.c2, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("case", list(CASES))
def test_c1_negative_and_closed_form(coeffs, case):
    c = coeffs[case]
    d = c.derived
    hm = c.h_minus
    qm = d.speed_c * hm - d.q0
    a0 = d.char_det(hm)
    long_form = 0.5 * c.f1[-1] - (d.h_right**1.5 - qm) / (a0 * (d.h_right - hm)) + (-d.speed_c + 2 * qm / hm) / a0
    if not c.riemann:
        assert long_form == pytest.approx(c.c1, rel=1e-10)
    assert c.c1 < 0


@pytest.mark.parametrize("case", ["conv", "stab_iv"])
def test_f3_negative_on_smooth_piece(coeffs, case):
    assert np.all(coeffs[case].f3 < 0)


@pytest.mark.parametrize("case", ["conv", "stab_iv"])
def test_second_derivative_identity(coeffs, case):
    c = coeffs[case]
    prof = c.profile
    x = c.x[(c.x > -8) & (c.x < -0.05)]
    delta = 1e-4
    hpp = (profile_rhs(prof.h_left_branch(x + delta), c.derived) - profile_rhs(prof.h_left_branch(x - delta), c.derived)) / (2 * delta)
    hp = profile_rhs(prof.h_left_branch(x), c.derived)
    f2 = c.at(x)["f2"]
    assert np.max(np.abs(hpp + f2 * hp)) < 1e-6


@pytest.mark.parametrize("case", ["conv", "stab_iv"])
def test_z_cubic_identity(coeffs, case):
    c = coeffs[case]
    d = c.derived
    z = ZCubic.of(d)
    q = d.speed_c * c.h - d.q0
    k1 = c.f4 - 0.5 * c.f1 * c.f2 - 0.5 * c.f1_prime
    lhs = c.a**2 * c.h**4 * k1
    rhs = -(2 * q / d.froude**2) * z(c.h)
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-10


def test_z_cubic_critical_point():
    d = derive(WaveParams(1, 0.7, 2.28))
    z = ZCubic.of(d)
    assert z.derivative(z.h_c) == pytest.approx(0.0, abs=1e-14)
    hs = np.linspace(z.h_c, 5 * z.h_c, 200)
    assert np.all(np.diff(z(hs)) > 0)
    nu = d.nu
    alt = d.froude * d.h_right * nu * math.sqrt(nu * nu + nu + 1) / (math.sqrt(6) * (nu + 1))
    assert z.h_c == pytest.approx(alt, rel=1e-14)


def test_liouville_form_of_slope(coeffs):
    # H' = C exp(-int f2), so v = exp(-int f2 / 2) has r = v'/v = -f2/2 with r' + r**2 = f2**2/4 - f2'/2
    c = coeffs["conv"]
    d = c.derived
    x = c.x[(c.x > -6) & (c.x < -0.05)]
    hs = c.profile.h_left_branch(x)
    delta = 1e-4
    f2 = lambda xx: _evaluate_coefficients(c.profile.h_left_branch(xx), d)["f2"]
    r = -0.5 * f2(x)
    dr = -0.5 * (f2(x + delta) - f2(x - delta)) / (2 * delta)
    vals = _evaluate_coefficients(hs, d)
    pot = 0.25 * vals["f2"] ** 2 - 0.5 * vals["f2_prime"]
    assert np.max(np.abs(dr + r * r - pot) / np.maximum(1.0, np.abs(pot))) < 1e-6


@pytest.mark.parametrize("case", list(CASES))
def test_decay_exponent_matches_dispersion(coeffs, case):
    rng = np.random.default_rng(5)
    lam = rng.uniform(-2, 5, 50) + 1j * rng.uniform(-10, 10, 50)
    res = decay_exponent_identity(coeffs[case], lam)
    assert np.max(np.abs(res)) < 1e-10 * np.max(np.abs(lam) ** 2 + 1)


def test_nonreal_bound_signs(coeffs):
    for case in CASES:
        b = nonreal_bound(coeffs[case])
        assert b.sign_ok
        assert b.bound < 0 and b.literal < 0


def test_nonreal_bound_vanishes_at_absolute_threshold():
    f = threshold_table(0.7).absolute
    c = reduced_coeffs(build_profile(WaveParams(1, 0.7, f - 1e-7), half_length=40.0))
    b = nonreal_bound(c)
    assert abs(b.z_left) < 1e-6
    assert abs(b.bound) < 1e-6


def test_numerator_positivity_iff_convective():
    for nu in np.linspace(1.1, 2.5, 6):
        t = threshold_table(1 / nu**2)
        for f in np.linspace(t.riemann, t.roll_wave, 9)[1:-1]:
            if abs(f - t.absolute) < 1e-3:
                continue
            c = reduced_coeffs(build_profile(WaveParams(nu * nu, 1.0, f), half_length=30.0, n_samples=2001))
            assert nonreal_bound(c).sign_ok == (f < t.absolute)


def test_b_form_riemann_lower_bound(coeffs):
    c = coeffs["riemann"]
    val = b_form_positivity(c, 2000, 40.0)
    assert val >= 0.25 * c.f2[0] ** 2 - 1e-12


def test_b_form_positive_convective(coeffs):
    assert b_form_positivity(coeffs["conv"], 6000, 60.0) > 0


def test_b_form_positive_across_convective_region():
    nu = math.sqrt(1 / 0.7)
    t = threshold_table(0.7)
    for f in np.linspace(2.0, t.absolute, 52)[1:-1]:
        p = WaveParams(1, 0.7, f)
        c = reduced_coeffs(build_profile(p, half_length=30.0, n_samples=2001))
        assert b_form_positivity(c, 600, 30.0) > 0, f
    assert nu > 1


def test_argument_principle_on_known_functions():
    contour = _notched_rectangle(10.0, 0.05, 100)
    assert argument_principle(lambda z: z - (1 + 1j), contour)[2] == 1
    assert argument_principle(lambda z: (z - 1) * (z - 2 + 3j) * (z + 1), contour)[2] == 2
    assert argument_principle(lambda z: z + 1, contour)[2] == 0
    assert argument_principle(lambda z: np.exp(z), contour)[2] == 0
    with pytest.raises(Inconclusive):
        argument_principle(lambda z: z - 10.0, _notched_rectangle(10.0, 0.05, 8), max_refinements=1)


def test_evans_vanishes_at_zero_with_nonzero_derivative(coeffs):
    for case in CASES:
        c = coeffs[case]
        d0 = evans_residual(c, 0.0)
        eps = 1e-5
        dprime = abs(evans_residual(c, eps) - evans_residual(c, -eps)) / (2 * eps)
        assert abs(d0) < 1e-6
        assert dprime > 1e-3


def test_flux_route_vanishes_at_zero(coeffs):
    for case in ("conv", "stab_iv"):
        c = coeffs[case]
        assert abs(flux_evans_residual(c, 0.0)) < 1e-8
        assert abs(flux_evans_residual(c, 1e-3)) > 1e-6


@pytest.mark.parametrize("case", list(CASES))
def test_routes_share_zero_free_ratio(coeffs, case):
    c = coeffs[case]
    lam = np.array([0.3, 1.0 + 1.0j, 3.0 - 2.0j, 6.0 + 5.0j])
    w_route = evans_residual(c, lam, normalize=False)
    ratios = np.array([flux_evans_residual(c, z) for z in lam]) / w_route
    assert np.all(np.abs(ratios) > 1e-8)
    assert np.all(np.isfinite(ratios))


def test_riemann_closed_form(coeffs):
    c = coeffs["riemann"]
    lam = np.array([0.2, 1 + 2j, 4 - 1j, 8.0])
    mu = np.sqrt(-c.k_infinity(lam))
    exact = lam * (mu - c.c1 * lam - c.c2)
    ours = evans_residual(c, lam, normalize=False)
    assert np.max(np.abs(ours - exact) / np.abs(exact)) < 1e-12


@pytest.mark.parametrize("case", ["conv", "stab_iv"])
def test_evans_invariant_under_resolution(coeffs, case):
    c = coeffs[case]
    lam = np.array([0.5, 2 + 3j, 10.0, 5j + 1])
    base = evans_residual(c, lam)
    longer = evans_residual(c, lam, truncation=2 * (c.tail_length() + 2.0))
    finer = evans_residual(c, lam, step=0.0025)
    assert np.max(np.abs(longer - base) / np.abs(base)) < 1e-6
    assert np.max(np.abs(finer - base) / np.abs(base)) < 1e-6


def test_evans_analytic_cauchy_riemann(coeffs):
    c = coeffs["conv"]
    h = 1e-3
    for z0 in (0.5 + 0.5j, 2.0 - 1.0j, 5.0 + 4.0j):
        pts = np.array([z0 + h, z0 - h, z0 + 1j * h, z0 - 1j * h])
        v = evans_residual(c, pts, normalize=False)
        dx = (v[0] - v[1]) / (2 * h)
        dy = (v[2] - v[3]) / (2 * h)
        assert abs(dx - dy / 1j) / max(abs(dx), 1.0) < 1e-4


def test_evans_large_real_lambda_nonzero(coeffs):
    c = coeffs["conv"]
    for lam in (1.0, 5.0, 10.0):
        assert abs(evans_residual(c, lam)) > 0.1


def test_evans_rejects_absolute_spectrum(coeffs):
    c = coeffs["conv"]
    line = absolute_lines(c.derived, 1.0)
    with pytest.raises(AbsoluteSpectrumError):
        evans_residual(c, complex(line.sigma, line.y + 1.0))


@pytest.mark.parametrize("case", list(CASES))
def test_no_unstable_eigenvalues(coeffs, case):
    scan = count_unstable(coeffs[case], lambda_max=10.0)
    assert scan.winding_count == 0
    assert scan.min_abs > 0


def test_unstable_region_rejected():
    c = reduced_coeffs(build_profile(WaveParams(1, 0.7, 2.30), half_length=40.0))
    with pytest.raises(AbsoluteSpectrumError):
        count_unstable(c)
