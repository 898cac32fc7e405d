"""Initial data: perturbed dambreak, perturbed profile, sampled arrays."""

import numpy as np

BUMP_CENTER = -5.0
BUMP_HALF_WIDTH_SQ = 0.5


def bump(x):
    """Smooth compactly supported bump ``exp(-1/(0.5 - (x+5)**2))``."""
    x = np.asarray(x, dtype=float)
    r = BUMP_HALF_WIDTH_SQ - (x - BUMP_CENTER) ** 2
    out = np.zeros_like(x)
    inside = r > 0
    out[inside] = np.exp(-1.0 / r[inside])
    return out


def bump_support():
    w = np.sqrt(BUMP_HALF_WIDTH_SQ)
    return BUMP_CENTER - w, BUMP_CENTER + w


def ic_dambreak(h_left: float, h_right: float, x, perturbed: bool = True):
    """Equilibrium ``h_left`` for ``x <= 0`` and ``h_right`` beyond, with the bump added to ``h``."""
    x = np.asarray(x, dtype=float)
    left = x <= 0
    h = np.where(left, h_left, h_right).astype(float)
    q = np.where(left, h_left**1.5, h_right**1.5).astype(float)
    if perturbed:
        h = h + bump(x)
    return h, q


def ic_profile(profile, x, amplitude: float = 0.0):
    """Traveling profile sampled at ``x`` plus ``amplitude`` times the bump in ``h``."""
    x = np.asarray(x, dtype=float)
    h = profile.h_at(x)
    q = profile.derived.speed_c * h - profile.derived.q0
    return h + amplitude * bump(x), q
