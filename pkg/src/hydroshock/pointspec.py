"""Point spectrum of discontinuous profiles.

On ``x < 0`` the eigenvalue problem reduces to the scalar equation

    w'' + k(lam, x) w = 0,   w'(0-) = (c1 lam + c2) w(0-),

with ``k = (f3 - f1**2/4) lam**2 + (f4 - f1 f2/2 - f1'/2) lam - f2**2/4 - f2'/2``.
Along the profile every coefficient is a function of ``H`` alone, so
x-derivatives come from the chain rule ``d/dx = H'(H) d/dH``, with the
H-derivative taken by complex step.

The translational eigenfunction at ``lam = 0`` has vanishing flux component
and is invisible to ``w``; the Evans function used here is therefore
``D(lam) = lam * D_w(lam)``, which has the same zeros as the boundary
mismatch of the full first-order system (see ``flux_evans_residual``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import AbsoluteSpectrumError, Inconclusive, InvalidParameters, NotConverged
from .profile import HydraulicProfile
from .spectrum import absolute_lines, optimal_gap, q_poly
from .wave_family import DerivedScalars, ProfileClass

STEP = 1e-20  # complex-step increment
ABS_SPECTRUM_GUARD = 1e-6


def _slope(h, d: DerivedScalars):
    hs = d.h_s
    num = d.froude**2 * (h - d.h_left) * (h - d.h_right) * (h - d.h_out)
    return num / ((h - hs) * (h * h + h * hs + hs * hs))


def _coefficients_of_h(h, d: DerivedScalars) -> dict:
    """Reduced-equation coefficients as functions of the profile height (complex-safe)."""
    f2_ = d.froude**2
    q0 = d.q0
    r = _slope(h, d)
    q = d.speed_c * h - q0
    beta = q0 / h  # c - Q/H
    a = h / f2_ - q0**2 / h**2
    a_prime = (1.0 / f2_ + 2.0 * q0**2 / h**3) * r
    f1 = 2.0 * beta / a
    f2 = -(1.0 - 2.0 * beta * q / h**2 - a_prime) / a
    f3 = -1.0 / a
    f4 = -(2.0 / a) * (q / h**2 + q0 * r / h**2)
    return {"a": a, "a_prime": a_prime, "f1": f1, "f2": f2, "f3": f3, "f4": f4, "slope": r, "q": q}


def _evaluate_coefficients(h, d: DerivedScalars) -> dict:
    h = np.asarray(h, dtype=float)
    base = _coefficients_of_h(h, d)
    shifted = _coefficients_of_h(h + 1j * STEP, d)
    out = {k: np.asarray(v, dtype=float) for k, v in base.items()}
    for name in ("f1", "f2"):
        out[name + "_prime"] = (np.imag(shifted[name]) / STEP) * base["slope"]
    f1, f2, f3, f4 = out["f1"], out["f2"], out["f3"], out["f4"]
    out["k2"] = f3 - 0.25 * f1**2
    out["k1"] = f4 - 0.5 * f1 * f2 - 0.5 * out["f1_prime"]
    out["k0"] = -0.25 * f2**2 - 0.5 * out["f2_prime"]
    out["h"] = h
    return out


@dataclass(frozen=True)
class ReducedCoefficients:
    profile: HydraulicProfile = field(repr=False)
    x: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    f1: np.ndarray = field(repr=False)
    f2: np.ndarray = field(repr=False)
    f3: np.ndarray = field(repr=False)
    f4: np.ndarray = field(repr=False)
    f1_prime: np.ndarray = field(repr=False)
    f2_prime: np.ndarray = field(repr=False)
    a_prime: np.ndarray = field(repr=False)
    c1: float
    c2: float
    h_minus: float
    riemann: bool
    limits: dict

    @property
    def derived(self) -> DerivedScalars:
        return self.profile.derived

    def at(self, x) -> dict:
        """Coefficients at arbitrary comoving positions ``x <= 0``."""
        x = np.asarray(x, dtype=float)
        if self.riemann:
            h = np.full_like(x, self.derived.h_left)
        else:
            h = self.profile.h_left_branch(x)
        return _evaluate_coefficients(h, self.derived)

    def k(self, lam, x) -> np.ndarray:
        c = self.at(x)
        lam = np.asarray(lam, dtype=complex)
        return c["k2"] * lam**2 + c["k1"] * lam + c["k0"]

    def k_infinity(self, lam):
        lim = self.limits
        lam = np.asarray(lam, dtype=complex)
        return lim["k2"] * lam**2 + lim["k1"] * lam + lim["k0"]

    def c2_jump_form(self) -> float:
        """``c2`` written with jumps across the subshock; equals ``c2``."""
        d = self.derived
        hm = self.h_minus
        qm = d.speed_c * hm - d.q0
        qr = d.speed_c * d.h_right - d.q0
        jump = (d.h_right - qr**2 / d.h_right**2) - (hm - qm**2 / hm**2)
        a0 = float(d.char_det(hm))
        if self.riemann:
            return 0.5 * self.limits["f2"]
        return 0.5 * float(self.f2[-1]) + jump / (a0 * (d.h_right - hm))

    def tail_length(self, tol: float = 1e-10) -> float:
        """Distance from 0 beyond which ``|H - H_L| < tol * H_L``."""
        if self.riemann:
            return 1.0
        d = self.derived
        branch = self.profile.left
        target = tol * d.h_left

        def g(x):
            return abs(float(branch.deviation(np.array([x]))[0])) - target

        lo = branch.x_end
        if g(lo) > 0:
            raise InvalidParameters("profile too short to reach the requested tail tolerance")
        return -brentq(g, lo, 0.0, xtol=1e-6)


def reduced_coeffs(profile: HydraulicProfile) -> ReducedCoefficients:
    kind = profile.profile_type
    if not kind.discontinuous:
        raise InvalidParameters(f"reduced eigenvalue problem needs a discontinuous profile, got {kind.value}")
    d = profile.derived
    riemann = kind is ProfileClass.RIEMANN_SHOCK
    mask = profile.grid <= 0.0
    x = profile.grid[mask]
    h = np.full_like(x, d.h_left) if riemann else profile.h_left_branch(x)
    c = _evaluate_coefficients(h, d)
    lim = _evaluate_coefficients(np.array([d.h_left]), d)
    limits = {k: float(v[0]) for k, v in lim.items()}
    h_minus = d.h_left if riemann else d.h_star
    a0 = float(d.char_det(h_minus))
    c1 = -d.q0 / (a0 * h_minus)
    f2_0 = float(_evaluate_coefficients(np.array([h_minus]), d)["f2"][0])
    c2 = 0.5 * f2_0 + (h_minus - d.h_left) * (h_minus - d.h_out) / (a0 * h_minus**2)
    return ReducedCoefficients(
        profile=profile,
        x=x,
        h=h,
        a=c["a"],
        f1=c["f1"],
        f2=c["f2"],
        f3=c["f3"],
        f4=c["f4"],
        f1_prime=c["f1_prime"],
        f2_prime=c["f2_prime"],
        a_prime=c["a_prime"],
        c1=c1,
        c2=c2,
        h_minus=h_minus,
        riemann=riemann,
        limits=limits,
    )


@dataclass(frozen=True)
class ZCubic:
    """``Z(h) = h**3 - F**2 c q0 h / 2 + F**2 q0**2 / 2`` and its critical point ``h_c``."""

    froude: float
    speed_c: float
    q0: float

    @classmethod
    def of(cls, d: DerivedScalars) -> "ZCubic":
        return cls(d.froude, d.speed_c, d.q0)

    @property
    def h_c(self) -> float:
        return self.froude * math.sqrt(self.speed_c * self.q0) / math.sqrt(6.0)

    def __call__(self, h):
        f2 = self.froude**2
        return h**3 - 0.5 * f2 * self.speed_c * self.q0 * h + 0.5 * f2 * self.q0**2

    def derivative(self, h):
        return 3.0 * h**2 - 0.5 * self.froude**2 * self.speed_c * self.q0


@dataclass(frozen=True)
class NonrealBound:
    """Upper bound on ``Re lam`` for non-real eigenvalues.

    ``bound`` follows from the imaginary part of the energy identity;
    ``literal`` is the cruder ratio of infima.  Both need ``numerator_inf > 0``.
    """

    bound: float
    literal: float
    numerator_inf: float
    denominator_inf: float
    denominator_sup: float
    sign_ok: bool
    z_left: float
    z_minus: float
    h_c: float


def nonreal_bound(coeffs: ReducedCoefficients) -> NonrealBound:
    d = coeffs.derived
    heights = np.append(coeffs.h, [d.h_left, coeffs.h_minus])
    c = _evaluate_coefficients(heights, d)
    numerator = -c["k1"]  # -f4 + f1 f2/2 + f1'/2
    denominator = np.abs(c["f3"]) + 0.25 * c["f1"] ** 2
    n_inf = float(np.min(numerator))
    p_inf = float(np.min(denominator))
    p_sup = float(np.max(denominator))
    z = ZCubic.of(d)
    return NonrealBound(
        bound=-n_inf / (2.0 * p_sup),
        literal=-n_inf / p_inf,
        numerator_inf=n_inf,
        denominator_inf=p_inf,
        denominator_sup=p_sup,
        sign_ok=n_inf > 0.0,
        z_left=float(z(d.h_left)),
        z_minus=float(z(coeffs.h_minus)),
        h_c=z.h_c,
    )


def _b_form_smallest(coeffs: ReducedCoefficients, n_grid: int, length: float) -> float:
    x = np.linspace(-length, 0.0, n_grid + 1)
    dx = x[1] - x[0]
    c = coeffs.at(x)
    potential = 0.25 * c["f2"] ** 2 + 0.5 * c["f2_prime"]
    mass = np.full(x.size, dx)
    mass[0] = mass[-1] = 0.5 * dx
    diag = np.full(x.size, 2.0 / dx)
    diag[0] = diag[-1] = 1.0 / dx
    diag += potential * mass
    diag[-1] -= coeffs.c2
    off = np.full(x.size - 1, -1.0 / dx)
    scale = 1.0 / np.sqrt(mass)
    vals = eigh_tridiagonal(diag * scale**2, off * scale[:-1] * scale[1:], eigvals_only=True, select="i", select_range=(0, 0))
    return float(vals[0])


def b_form_positivity(coeffs: ReducedCoefficients, n_grid: int = 6000, domain_length: float = 60.0) -> float:
    """Smallest Rayleigh quotient of ``B(v, v) / ||v||**2`` on ``[-domain_length, 0]``.

    Piecewise-linear finite elements with lumped mass; the boundary term
    ``-c2 |v(0-)|**2`` enters the last diagonal entry and the far end is left
    natural.  The estimate must agree with the one on a twice finer grid to 5%.
    """
    if n_grid < 16 or domain_length <= 0:
        raise InvalidParameters("n_grid must be >= 16 and domain_length positive")
    coarse = _b_form_smallest(coeffs, n_grid, domain_length)
    fine = _b_form_smallest(coeffs, 2 * n_grid, domain_length)
    if abs(fine - coarse) > 0.05 * max(abs(fine), 1e-12):
        raise NotConverged(f"smallest eigenvalue of B moved from {coarse} to {fine} under refinement")
    return fine


class EvansIntegrator:
    """Fourth-order Magnus propagation of ``(w, w')`` from ``-truncation`` to ``0``.

    Coefficients are sampled once at the Gauss nodes so that many ``lam`` can
    be propagated together.  The state is carried as ``(w, w') exp(-mu x)``,
    which stays bounded, is independent of the truncation up to the profile's
    tail, and keeps the result analytic in ``lam``.
    """

    def __init__(self, coeffs: ReducedCoefficients, truncation: Optional[float] = None, step: float = 0.005):
        if truncation is None:
            truncation = coeffs.tail_length() + 2.0
        if truncation <= 0 or step <= 0:
            raise InvalidParameters("truncation and step must be positive")
        self.coeffs = coeffs
        self.truncation = float(truncation)
        n = max(int(math.ceil(self.truncation / step)), 4)
        self.h = self.truncation / n
        left = -self.truncation + self.h * np.arange(n)
        off = self.h * (0.5 - math.sqrt(3.0) / 6.0), self.h * (0.5 + math.sqrt(3.0) / 6.0)
        nodes = [coeffs.at(left + o) for o in off]
        self._k1 = [nodes[0][k] for k in ("k2", "k1", "k0")]
        self._k2 = [nodes[1][k] for k in ("k2", "k1", "k0")]
        self.n_steps = n

    def mu(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        mu = np.sqrt(-self.coeffs.k_infinity(lam))
        if np.any(mu.real <= 0.0):
            raise AbsoluteSpectrumError("no decaying mode: lam lies on the absolute spectrum")
        return mu

    def propagate(self, lam) -> tuple[np.ndarray, np.ndarray]:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        mu = self.mu(lam)
        w = np.ones_like(lam)
        wp = mu.copy()
        h = self.h
        lam2 = lam * lam
        c3 = math.sqrt(3.0) * h * h / 12.0
        damp = np.exp(-mu * h)
        for i in range(self.n_steps):
            ka = self._k1[0][i] * lam2 + self._k1[1][i] * lam + self._k1[2][i]
            kb = self._k2[0][i] * lam2 + self._k2[1][i] * lam + self._k2[2][i]
            d = c3 * (kb - ka)
            e = -0.5 * h * (ka + kb)
            s = np.sqrt(d * d + h * e)
            s = np.where(s.real < 0, -s, s)
            ep = np.exp(s - mu * h)
            em = np.exp(-s) * damp
            ch = 0.5 * (ep + em)
            small = np.abs(s) < 1e-8
            safe = np.where(small, 1.0, s)
            sh = np.where(small, damp * (1.0 + s * s / 6.0), 0.5 * (ep - em) / safe)
            w, wp = ch * w + sh * (d * w + h * wp), sh * e * w + ch * wp - sh * d * wp
        return w, wp

    def residual(self, lam, normalize: bool = True) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        w, wp = self.propagate(lam)
        dw = wp - (self.coeffs.c1 * lam + self.coeffs.c2) * w
        if normalize:
            dw = dw / np.maximum(np.abs(w), np.abs(wp))
        return lam * dw


def _check_off_absolute(coeffs: ReducedCoefficients, lam) -> None:
    line = absolute_lines(coeffs.derived, coeffs.derived.h_left)
    for z in np.atleast_1d(lam):
        if line.distance(complex(z)) < ABS_SPECTRUM_GUARD:
            raise AbsoluteSpectrumError(f"lam = {z} is within {ABS_SPECTRUM_GUARD} of the absolute spectrum")


def evans_residual(
    coeffs: ReducedCoefficients,
    lam,
    truncation: Optional[float] = None,
    step: float = 0.005,
    normalize: bool = True,
):
    """Evans-type residual ``lam * (w'(0-) - (c1 lam + c2) w(0-))`` of the decaying ``w``.

    ``w`` is started as ``exp(mu x)`` at ``x = -truncation`` with ``mu**2 = -k(lam, -inf)``
    and ``Re mu > 0``.  With ``normalize`` the bracket is divided by
    ``max(|w(0-)|, |w'(0-)|)``.  Accepts scalars or arrays.
    """
    scalar = np.ndim(lam) == 0
    _check_off_absolute(coeffs, lam)
    out = EvansIntegrator(coeffs, truncation, step).residual(lam, normalize)
    return complex(out[0]) if scalar else out


def _flux_matrix(c: dict, d: DerivedScalars, lam: complex) -> np.ndarray:
    """Matrix of ``(u1, u2)' = M (u1, u2)`` at a single position."""
    h, a, q, r, a_prime = (float(np.ravel(c[k])[0]) for k in ("h", "a", "q", "slope", "a_prime"))
    beta = d.q0 / h
    alpha = 1.0 - 2.0 * beta * q / h**2
    gam = 2.0 * q / h**2 + 2.0 * d.q0 * r / h**2
    return np.array([[(alpha - 2.0 * lam * beta - a_prime) / a, -(lam + gam) / a], [-lam, 0.0]], dtype=complex)


def flux_evans_residual(coeffs: ReducedCoefficients, lam: complex, truncation: Optional[float] = None, rtol: float = 1e-10) -> complex:
    """Boundary mismatch of the first-order system for ``(u1, u2) = (v1, -c v1 + v2)``.

    An independent route to the point spectrum: integrates the full system
    with an adaptive Runge-Kutta method from the decaying eigenvector at
    ``-truncation`` and evaluates the jump condition at ``0-``.  It vanishes at
    ``lam = 0`` through the translational mode; in the Riemann case the jump
    condition carries an explicit factor ``lam``.
    """
    lam = complex(lam)
    _check_off_absolute(coeffs, lam)
    d = coeffs.derived
    if truncation is None:
        truncation = coeffs.tail_length() + 2.0
    m_inf = _flux_matrix(_evaluate_coefficients(np.array([d.h_left]), d), d, lam)
    vals, vecs = np.linalg.eig(m_inf)
    j = int(np.argmax(vals.real))
    gamma = vals[j]
    u0 = vecs[:, j] / (vecs[0, j] if abs(vecs[0, j]) > abs(vecs[1, j]) else vecs[1, j])

    def rhs(x, y):
        c = coeffs.at(np.array([x]))
        m = _flux_matrix(c, d, lam)
        return m @ y - gamma * y

    sol = solve_ivp(rhs, (-truncation, 0.0), u0.astype(complex), method="DOP853", rtol=rtol, atol=1e-14)
    u1, u2 = sol.y[:, -1]
    hm = coeffs.h_minus
    qm = d.speed_c * hm - d.q0
    qr = d.speed_c * d.h_right - d.q0
    a0 = float(d.char_det(hm))
    jump_h = d.h_right - hm
    jump_q = qr - qm
    flux2 = a0 * u1 + (-d.speed_c + 2.0 * qm / hm) * u2
    if coeffs.riemann:
        residual = u2 * jump_q - flux2 * jump_h
        residual *= lam
    else:
        jump_m = (d.h_right - qr**2 / d.h_right**2) - (hm - qm**2 / hm**2)
        residual = u2 * (lam * jump_q - jump_m) - flux2 * lam * jump_h
    return complex(residual / max(abs(u1), abs(u2)))


@dataclass(frozen=True)
class EvansScan:
    contour: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    winding_count: int
    excluded_radius: float
    truncation: float
    lambda_max: float

    @property
    def min_abs(self) -> float:
        return float(np.min(np.abs(self.values)))


def _notched_rectangle(lambda_max: float, r0: float, n: int) -> np.ndarray:
    """Counter-clockwise boundary of ``[0, L] x [-L, L]`` minus the disk ``|lam| < r0``."""
    L = lambda_max
    right = L + 1j * np.linspace(-L, L, n, endpoint=False)
    top = np.linspace(L, 0.0, n, endpoint=False) + 1j * L
    upper = 1j * np.linspace(L, r0, n, endpoint=False)
    arc = r0 * np.exp(1j * np.linspace(math.pi / 2, -math.pi / 2, max(n // 4, 16), endpoint=False))
    lower = 1j * np.linspace(-r0, -L, n, endpoint=False)
    bottom = np.linspace(0.0, L, n, endpoint=False) - 1j * L
    return np.concatenate([right, top, upper, arc, lower, bottom])


def argument_principle(func, contour: np.ndarray, max_refinements: int = 12):
    """Winding number of ``func`` along a closed polygonal contour.

    ``func`` maps an array of points to values.  Segments whose phase
    increment reaches ``pi/2`` are bisected until none is left.
    """
    lam = np.asarray(contour, dtype=complex)
    vals = np.asarray(func(lam), dtype=complex)
    for _ in range(max_refinements):
        if np.min(np.abs(vals)) == 0.0:
            raise Inconclusive("the function vanishes on the contour")
        closed = np.append(vals, vals[0])
        dphi = np.angle(closed[1:] / closed[:-1])
        bad = np.nonzero(np.abs(dphi) >= math.pi / 2)[0]
        if bad.size == 0:
            break
        lam_closed = np.append(lam, lam[0])
        mids = 0.5 * (lam_closed[bad] + lam_closed[bad + 1])
        lam = np.insert(lam, bad + 1, mids)
        vals = np.insert(vals, bad + 1, np.asarray(func(mids), dtype=complex))
    else:
        raise Inconclusive("phase increments along the contour did not drop below pi/2")
    if np.min(np.abs(vals)) == 0.0:
        raise Inconclusive("the function vanishes on the contour")
    closed = np.append(vals, vals[0])
    winding = float(np.sum(np.angle(closed[1:] / closed[:-1]))) / (2 * math.pi)
    count = int(round(winding))
    if abs(winding - count) > 1e-6:
        raise Inconclusive(f"winding number {winding} is not close to an integer")
    return lam, vals, count


def count_unstable(
    coeffs: ReducedCoefficients,
    lambda_max: float = 10.0,
    r0: Optional[float] = None,
    n_initial: int = 200,
    max_refinements: int = 12,
    truncation: Optional[float] = None,
    step: float = 0.005,
) -> EvansScan:
    """Number of zeros of ``D`` in the notched rectangle ``[0, L] x [-L, L]`` minus ``|lam| < r0``.

    ``r0`` defaults to ``0.05 theta_opt`` (``0.05`` when there is no gap).
    """
    if r0 is None:
        theta = optimal_gap(coeffs.derived.params).theta_opt
        r0 = 0.05 * theta if theta > 0 else 0.05
    if not 0 < r0 < lambda_max:
        raise InvalidParameters("need 0 < r0 < lambda_max")
    line = absolute_lines(coeffs.derived, coeffs.derived.h_left)
    reach = max(b.real for b in line.branch_points)
    if line.sigma >= 0.0 or reach >= 0.0:
        raise AbsoluteSpectrumError("the absolute spectrum of H_L reaches the closed right half-plane")
    integ = EvansIntegrator(coeffs, truncation, step)
    lam = _notched_rectangle(lambda_max, r0, n_initial)
    _check_off_absolute(coeffs, lam)
    lam, vals, count = argument_principle(integ.residual, lam, max_refinements)
    return EvansScan(lam, vals, count, r0, integ.truncation, lambda_max)


def decay_exponent_identity(coeffs: ReducedCoefficients, lam) -> np.ndarray:
    """``-k(lam, -inf) * a_L**2 - Q_{H_L}(lam)``, identically zero."""
    d = coeffs.derived
    a_left = float(d.char_det(d.h_left))
    return -coeffs.k_infinity(lam) * a_left**2 - q_poly(d, d.h_left, lam)
