"""Essential and absolute spectrum at the endstates.

At an equilibrium endstate ``h`` the linearized operator has constant
coefficients ``A_h`` and ``E_h``; its spatial eigenvalues are the
eigenvalues ``gamma_{+/-}`` of ``G_h(lam) = A_h^{-1} (E_h - lam)``.  Everything
below is explicit: dispersion polynomials, weighted boundary curves, branch
points, absolute-spectrum half-lines and the admissible left weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import CharacteristicState, InvalidParameters
from .profile import decay_rates
from .wave_family import DerivedScalars, ProfileClass, WaveParams, classify_existence, derive

ON_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class EndstateDispersion:
    """Constant-coefficient data at one endstate height ``h``.

    ``a_h = (c - sqrt(h))**2 - h / F**2`` is the determinant of ``A_h``; at an
    equilibrium endstate ``c - sqrt(h) = q0 / h`` so ``a_h = -a(h)``.
    """

    h: float
    speed_c: float
    q0: float
    froude: float
    a_h: float

    @classmethod
    def at(cls, derived: DerivedScalars, h: float) -> "EndstateDispersion":
        c, f = derived.speed_c, derived.froude
        a_h = (c - math.sqrt(h)) ** 2 - h / f**2
        return cls(h, c, derived.q0, f, a_h)

    @property
    def drift(self) -> float:
        return self.speed_c - math.sqrt(self.h)

    @property
    def t0(self) -> float:
        return 1.5 - self.speed_c / math.sqrt(self.h)

    def a_matrix(self) -> np.ndarray:
        c, h, f = self.speed_c, self.h, self.froude
        return np.array([[-c, 1.0], [h * (-1.0 + 1.0 / f**2), -c + 2.0 * math.sqrt(h)]])

    def e_matrix(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [3.0, -2.0 / math.sqrt(self.h)]])

    def g_matrix(self, lam: complex) -> np.ndarray:
        return np.linalg.solve(self.a_matrix(), self.e_matrix() - lam * np.eye(2))

    def q_poly(self, lam):
        h, f = self.h, self.froude
        return lam * lam * h / f**2 + lam * (-self.drift + 2.0 * math.sqrt(h) / f**2) + self.t0**2

    def gamma(self, lam, branch: int = 1):
        if abs(self.a_h) <= 1e-12 * self.h / self.froude**2:
            raise CharacteristicState("characteristic endstate: A_h is singular")
        lam = np.asarray(lam, dtype=complex)
        root = np.sqrt(self.q_poly(lam))
        return (lam * self.drift - self.t0 + branch * root) / self.a_h


def _dispersion(derived: DerivedScalars, h: float) -> EndstateDispersion:
    if h <= 0:
        raise InvalidParameters("endstate height must be positive")
    return EndstateDispersion.at(derived, h)


def q_poly(derived: DerivedScalars, h: float, lam):
    """``Q_h(lam)``; the two spatial eigenvalues share a real part iff ``Q_h <= 0``."""
    return _dispersion(derived, h).q_poly(np.asarray(lam, dtype=complex))


def gamma_pm(derived: DerivedScalars, h: float, lam, branch: int = 1):
    """Spatial eigenvalue ``gamma_{branch}`` (principal square root), vectorized in ``lam``."""
    if branch not in (1, -1):
        raise InvalidParameters("branch must be +1 or -1")
    return _dispersion(derived, h).gamma(lam, branch)


def g_matrix(derived: DerivedScalars, h: float, lam: complex) -> np.ndarray:
    return _dispersion(derived, h).g_matrix(lam)


def boundary_curve(derived: DerivedScalars, h: float, eta: float, xi, continuation: bool = True) -> np.ndarray:
    """Curves ``lam(xi)`` on which a spatial eigenvalue equals ``eta + i xi``.

    Returns an array of shape ``(2, len(xi))``; row 0 is the ``+`` root and
    row 1 the ``-`` root at the first sample, rows being continued along
    ``xi`` by nearest-neighbour matching when ``continuation`` is set.
    """
    xi = np.asarray(xi, dtype=float)
    k = eta + 1j * xi
    sq = math.sqrt(h)
    base = k * (derived.speed_c - sq) - 1.0 / sq
    root = np.sqrt(k * k * h / derived.froude**2 - k + 1.0 / h)
    curves = np.vstack([base + root, base - root])
    if continuation and xi.size > 1:
        for i in range(1, xi.size):
            prev = curves[:, i - 1]
            cur = curves[:, i]
            keep = abs(cur[0] - prev[0]) + abs(cur[1] - prev[1])
            swap = abs(cur[1] - prev[0]) + abs(cur[0] - prev[1])
            if swap < keep:
                curves[:, i] = cur[::-1]
    return curves


def auto_xi_grid(derived: DerivedScalars, h: float, eta: float, n: int = 2001, tail: bool = False) -> np.ndarray:
    """Symmetric grid of ``n`` points on ``[-Xi, Xi]``.

    Real parts along the curves tend to constants as ``|xi| -> inf`` while the
    imaginary parts grow linearly, so ``Xi`` doubles until the real parts at
    ``+/-Xi`` are within 1% of the curve's spread from their far-field values.
    With ``tail`` a geometric extension to ``1e6`` is appended.
    """
    far = np.array([-1e9, 1e9])
    re_far = np.sort(boundary_curve(derived, h, eta, far, continuation=False).real.ravel())
    xi_max = 1.0
    for _ in range(40):
        core = np.linspace(-xi_max, xi_max, 401)
        spread = max(np.ptp(boundary_curve(derived, h, eta, core, continuation=False).real), 1e-12)
        ends = np.sort(boundary_curve(derived, h, eta, xi_max * np.array([-1.0, 1.0]), continuation=False).real.ravel())
        if np.max(np.abs(ends - re_far)) < 0.01 * spread:
            break
        xi_max *= 2.0
    grid = np.linspace(-xi_max, xi_max, n)
    if tail:
        ext = np.geomspace(xi_max * 1.05, 1e6, 400)
        grid = np.concatenate([-ext[::-1], grid, ext])
    return grid


class WeightWindow(NamedTuple):
    eta_min: float
    eta_max: float

    @property
    def empty(self) -> bool:
        return not self.eta_min < self.eta_max

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.eta_min + self.eta_max)


def asymptotic_thresholds(params: WaveParams) -> WeightWindow:
    """Closed-form ``(gamma_+^inf, gamma_-^inf)`` at the left endstate."""
    d = derive(params)
    hl, f = params.h_left, params.froude
    r = d.speed_c / math.sqrt(hl)
    eta_min = (f / 2.0 - 1.0) / (hl * (-r + 1.0 + 1.0 / f))
    eta_max = (1.0 + f / 2.0) / (hl * (r - 1.0 + 1.0 / f))
    return WeightWindow(eta_min, eta_max)


def sup_real_part(derived: DerivedScalars, h: float, eta: float, xi: Optional[np.ndarray] = None) -> float:
    """Largest real part over both boundary curves at weight ``eta``."""
    if xi is None:
        xi = np.concatenate([-np.geomspace(1e-6, 1e6, 3000)[::-1], [0.0], np.geomspace(1e-6, 1e6, 3000)])
    return float(np.max(boundary_curve(derived, h, eta, xi, continuation=False).real))


def weight_window(params: WaveParams) -> WeightWindow:
    """Left weights that stabilize the essential spectrum coming from ``H_L``.

    For ``F >= 2`` the window is given in closed form by the large-frequency
    limits of the spatial eigenvalues.  For ``F < 2`` the binding constraint
    comes from finite frequencies; the window is then ``(0, eta_up)`` with
    ``eta_up`` located numerically, a heuristic search.
    """
    closed = asymptotic_thresholds(params)
    if params.froude >= 2.0:
        return closed
    d = derive(params)
    hl = params.h_left
    upper = closed.eta_max
    etas = np.linspace(0.0, upper, 101)[1:]
    sups = np.array([sup_real_part(d, hl, e) for e in etas])
    bad = np.nonzero(sups >= 0.0)[0]
    if bad.size == 0:
        return WeightWindow(0.0, upper)
    if bad[0] == 0:
        lo, hi = 0.0, etas[0]
        lo = hi * 1e-6
        if sup_real_part(d, hl, lo) >= 0.0:
            return WeightWindow(0.0, 0.0)
    else:
        lo, hi = etas[bad[0] - 1], etas[bad[0]]
    eta_up = brentq(lambda e: sup_real_part(d, hl, e), lo, hi, xtol=1e-10)
    return WeightWindow(0.0, eta_up)


class OptimalGap(NamedTuple):
    theta_opt: float
    eta_opt: float


def optimal_gap(params: WaveParams) -> OptimalGap:
    """Upper bound ``theta_opt`` on the essential spectral gap and the weight realizing it."""
    d = derive(params)
    hl, f = params.h_left, params.froude
    theta = (f * f / (2.0 * hl)) * (-(d.speed_c - math.sqrt(hl)) + 2.0 * math.sqrt(hl) / f**2)
    return OptimalGap(theta, f * f / (2.0 * hl))


def half_gap_window(params: WaveParams) -> WeightWindow:
    """Left weights for which the essential spectrum keeps at least half of ``theta_opt``.

    The supremum of ``Re lam`` over the left boundary curves is piecewise
    linear in ``eta``, vanishing at the window ends and equal to ``-theta_opt``
    at ``eta_opt``; it stays below ``-theta_opt / 2`` between the midpoints.
    """
    window = weight_window(params)
    eta_opt = optimal_gap(params).eta_opt
    return WeightWindow(0.5 * (window.eta_min + eta_opt), 0.5 * (eta_opt + window.eta_max))


@dataclass(frozen=True)
class AbsoluteLine:
    """Absolute spectrum of one endstate, where ``Q_h(lam)`` is real and nonpositive.

    On ``Re lam = sigma`` one has ``Q_h = Q_h(sigma) - Im(lam)**2 h / F**2``.  If
    ``Q_h(sigma) >= 0`` the set is the half-lines ``|Im lam| >= y``; otherwise the
    whole vertical line plus the real segment between the two real branch points.
    """

    h: float
    sigma: float
    y: float
    q_sigma: float
    curvature: float  # h / F**2
    unstable: bool

    @property
    def branch_points(self) -> tuple[complex, complex]:
        if self.q_sigma >= 0.0:
            return (complex(self.sigma, self.y), complex(self.sigma, -self.y))
        half = math.sqrt(-self.q_sigma / self.curvature)
        return (complex(self.sigma + half, 0.0), complex(self.sigma - half, 0.0))

    def sample(self, y_max: float, n: int = 200) -> np.ndarray:
        ys = np.linspace(self.y, max(y_max, self.y), n)
        return np.concatenate([self.sigma + 1j * ys, self.sigma - 1j * ys])

    def distance(self, lam: complex) -> float:
        """Euclidean distance from ``lam`` to this absolute spectrum."""
        dre = abs(lam.real - self.sigma)
        if self.q_sigma >= 0.0:
            gap = max(self.y - abs(lam.imag), 0.0)
            return math.hypot(dre, gap)
        lo, hi = sorted(b.real for b in self.branch_points)
        seg = math.hypot(max(lo - lam.real, 0.0, lam.real - hi), lam.imag)
        return min(dre, seg)


def absolute_lines(derived: DerivedScalars, h: float) -> AbsoluteLine:
    disp = _dispersion(derived, h)
    f = derived.froude
    alpha = h / f**2
    sigma = (f * f / (2.0 * h)) * (disp.drift - 2.0 * math.sqrt(h) / f**2)
    q_sigma = float(disp.q_poly(sigma).real)
    y = math.sqrt(max(q_sigma, 0.0) / alpha)
    return AbsoluteLine(h, sigma, y, q_sigma, alpha, sigma >= 0.0 and h > derived.h_s)


def sqrt_extrema(alpha: float, beta: float, gamma: float) -> tuple[float, float]:
    """``inf`` and ``sup`` over real ``y`` of ``Re sqrt(-alpha y^2 + i beta y + gamma)``."""
    if not alpha > 0 or not gamma > 0:
        raise InvalidParameters("alpha and gamma must be positive")
    a = math.sqrt(gamma)
    b = abs(beta) / (2.0 * math.sqrt(alpha))
    return (min(a, b), max(a, b))


@dataclass(frozen=True)
class SplittingCount:
    greater: int
    less: int
    on_boundary: bool


def splitting_counts(derived: DerivedScalars, h: float, lam: complex, eta: float) -> SplittingCount:
    """Number of spatial eigenvalues with real part above and below ``eta``."""
    disp = _dispersion(derived, h)
    re = np.array([disp.gamma(lam, 1).real, disp.gamma(lam, -1).real]).ravel()
    on = bool(np.any(np.abs(re - eta) <= ON_BOUNDARY_TOL))
    return SplittingCount(int(np.sum(re > eta)), int(np.sum(re < eta)), on)


def in_essential_spectrum(params: WaveParams, lam: complex, eta_left: float, eta_right: float) -> bool:
    """Weighted essential-spectrum membership by the spatial-eigenvalue counting rule."""
    d = derive(params)
    left = splitting_counts(d, params.h_left, lam, eta_left)
    right = splitting_counts(d, params.h_right, lam, eta_right)
    if left.on_boundary or right.on_boundary:
        return True
    expected = 1 if classify_existence(params).discontinuous else 2
    return left.greater + right.less != expected


@dataclass(frozen=True)
class SpectrumGeometry:
    params: WaveParams
    eta_left: float
    eta_right: float
    xi: np.ndarray = field(repr=False)
    boundary_curves: dict = field(repr=False)
    branch_points: dict
    absolute_lines: dict
    weight_window: WeightWindow
    gap: float
    eta_opt: float
    eta_inf: tuple[float, float]

    def max_real_part(self, endstate: str = "left") -> float:
        return float(max(np.max(c.real) for (side, _), c in self.boundary_curves.items() if side == endstate))

    def right_counts_ok(self, lam_samples=None) -> bool:
        """Whether the right endstate has no spatial eigenvalue below ``eta_right`` for ``Re lam >= 0``."""
        d = derive(self.params)
        if lam_samples is None:
            re = np.linspace(0.0, 10.0, 21)
            im = np.linspace(-50.0, 50.0, 101)
            lam_samples = (re[:, None] + 1j * im[None, :]).ravel()
        for lam in lam_samples:
            cnt = splitting_counts(d, self.params.h_right, lam, self.eta_right)
            if cnt.on_boundary or cnt.less != 0:
                return False
        return True


def spectrum_geometry(
    params: WaveParams,
    eta_left: Optional[float] = None,
    eta_right: Optional[float] = None,
    xi: Optional[np.ndarray] = None,
) -> SpectrumGeometry:
    d = derive(params)
    gap = optimal_gap(params)
    window = weight_window(params)
    if eta_left is None:
        if params.froude >= 2.0 or window.empty or math.isnan(window.eta_min):
            eta_left = gap.eta_opt
        else:
            eta_left = window.midpoint
    if eta_right is None:
        eta_right = -5.0 * gap.eta_opt
    curves = {}
    lines = {}
    branch = {}
    for side, h, eta in (("left", params.h_left, eta_left), ("right", params.h_right, eta_right)):
        grid = auto_xi_grid(d, h, eta) if xi is None else np.asarray(xi, dtype=float)
        c = boundary_curve(d, h, eta, grid)
        curves[(side, 1)] = c[0]
        curves[(side, -1)] = c[1]
        line = absolute_lines(d, h)
        lines[side] = line
        branch[side] = line.branch_points
    return SpectrumGeometry(
        params=params,
        eta_left=eta_left,
        eta_right=eta_right,
        xi=grid,
        boundary_curves=curves,
        branch_points=branch,
        absolute_lines=lines,
        weight_window=window,
        gap=gap.theta_opt,
        eta_opt=gap.eta_opt,
        eta_inf=decay_rates(d),
    )
