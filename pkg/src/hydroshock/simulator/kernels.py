"""Compiled inner loops: HLL-Einfeldt fluxes, MUSCL-Hancock predictor, source stage.

Arrays carry two ghost cells per side.  Every routine is written for the
comoving flux ``f(w) - s w``; ``s = 0`` gives the lab frame.
"""

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

NGHOST = 2


@njit(cache=True)
def _minmod(a, b):
    if a * b <= 0.0:
        return 0.0
    return a if abs(a) < abs(b) else b


@njit(cache=True)
def _phys_flux(h, q, g2):
    return q, q * q / h + g2 * h * h


@njit(cache=True)
def max_comoving_speed(h, q, inv_f, s):
    """Largest ``|u +/- sqrt(h)/F - s|`` over all cells, reduced left to right."""
    best = 0.0
    for i in range(h.shape[0]):
        u = q[i] / h[i]
        a = math.sqrt(h[i]) * inv_f
        v = max(abs(u - a - s), abs(u + a - s))
        if v > best:
            best = v
    return best


@njit(cache=True)
def _hll(hl, ql, hr, qr, inv_f, s, out):
    g2 = 0.5 * inv_f * inv_f
    ul = ql / hl
    ur = qr / hr
    al = math.sqrt(hl) * inv_f
    ar = math.sqrt(hr) * inv_f
    sl_, sr_ = math.sqrt(hl), math.sqrt(hr)
    ubar = (sl_ * ul + sr_ * ur) / (sl_ + sr_)
    abar = math.sqrt(0.5 * (hl + hr)) * inv_f
    smin = min(ul - al, ubar - abar) - s
    smax = max(ur + ar, ubar + abar) - s
    f0l, f1l = _phys_flux(hl, ql, g2)
    f0r, f1r = _phys_flux(hr, qr, g2)
    f0l -= s * hl
    f1l -= s * ql
    f0r -= s * hr
    f1r -= s * qr
    if smin >= 0.0:
        out[0] = f0l
        out[1] = f1l
    elif smax <= 0.0:
        out[0] = f0r
        out[1] = f1r
    else:
        inv = 1.0 / (smax - smin)
        out[0] = (smax * f0l - smin * f0r + smin * smax * (hr - hl)) * inv
        out[1] = (smax * f1l - smin * f1r + smin * smax * (qr - ql)) * inv


@njit(cache=True)
def hyperbolic_step(h, q, dt, dx, inv_f, s, second_order, fluxes):
    """Conservative update of interior cells in place; ``fluxes`` receives interface fluxes.

    ``fluxes[j]`` is the flux through the left face of interior cell ``j``;
    ``fluxes[n]`` is the right face of the last one.
    """
    m = h.shape[0]
    n = m - 2 * NGHOST
    g2 = 0.5 * inv_f * inv_f
    lam = 0.5 * dt / dx
    # face states of cells 1 .. m-2: [:, 0] left face, [:, 1] right face
    fh = np.empty((m, 2))
    fq = np.empty((m, 2))
    for i in range(1, m - 1):
        dh = 0.0
        dq = 0.0
        if second_order:
            dh = _minmod(h[i] - h[i - 1], h[i + 1] - h[i])
            dq = _minmod(q[i] - q[i - 1], q[i + 1] - q[i])
        hl = h[i] - 0.5 * dh
        hr = h[i] + 0.5 * dh
        ql = q[i] - 0.5 * dq
        qr = q[i] + 0.5 * dq
        if second_order and hl > 0.0 and hr > 0.0:
            a0, a1 = _phys_flux(hl, ql, g2)
            b0, b1 = _phys_flux(hr, qr, g2)
            d0 = (b0 - s * hr) - (a0 - s * hl)
            d1 = (b1 - s * qr) - (a1 - s * ql)
            hl2 = hl - lam * d0
            hr2 = hr - lam * d0
            if hl2 > 0.0 and hr2 > 0.0:
                hl, hr = hl2, hr2
                ql -= lam * d1
                qr -= lam * d1
            else:
                hl = hr = h[i]
                ql = qr = q[i]
        elif hl <= 0.0 or hr <= 0.0:
            hl = hr = h[i]
            ql = qr = q[i]
        fh[i, 0] = hl
        fh[i, 1] = hr
        fq[i, 0] = ql
        fq[i, 1] = qr
    out = np.empty(2)
    for j in range(n + 1):
        left = NGHOST - 1 + j
        _hll(fh[left, 1], fq[left, 1], fh[left + 1, 0], fq[left + 1, 0], inv_f, s, out)
        fluxes[j, 0] = out[0]
        fluxes[j, 1] = out[1]
    r = dt / dx
    for j in range(n):
        i = NGHOST + j
        h[i] -= r * (fluxes[j + 1, 0] - fluxes[j, 0])
        q[i] -= r * (fluxes[j + 1, 1] - fluxes[j, 1])


@njit(cache=True)
def source_step(h, q, dt):
    """Explicit midpoint rule for ``q' = h - |q| q / h**2``; ``h`` is untouched."""
    for i in range(NGHOST, h.shape[0] - NGHOST):
        hi = h[i]
        qi = q[i]
        k1 = hi - abs(qi) * qi / (hi * hi)
        qm = qi + 0.5 * dt * k1
        q[i] = qi + dt * (hi - abs(qm) * qm / (hi * hi))


@njit(cache=True)
def fill_ghosts(h, q, kind, hl, ql, hr, qr):
    """``kind`` 0 holds fixed states, 1 copies the nearest interior cell."""
    m = h.shape[0]
    for g in range(NGHOST):
        if kind == 0:
            h[g] = hl
            q[g] = ql
            h[m - 1 - g] = hr
            q[m - 1 - g] = qr
        else:
            h[g] = h[NGHOST]
            q[g] = q[NGHOST]
            h[m - 1 - g] = h[m - 1 - NGHOST]
            q[m - 1 - g] = q[m - 1 - NGHOST]
