"""Flux, source and wave speeds of the inclined shallow-water balance law."""

import numpy as np

from ..errors import InvalidParameters


def _check_positive(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise InvalidParameters("height must be positive")
    return h


def flux(h, q, froude: float):
    """Physical flux ``(q, q**2/h + h**2/(2 F**2))``."""
    h = _check_positive(h)
    q = np.asarray(q, dtype=float)
    return q, q * q / h + h * h / (2.0 * froude * froude)


def source(h, q):
    """Gravity minus friction ``(0, h - |q| q / h**2)``; zero on equilibria ``q = h**1.5``."""
    h = _check_positive(h)
    q = np.asarray(q, dtype=float)
    return np.zeros_like(h * q), h - np.abs(q) * q / (h * h)


def wave_speeds(h, q, froude: float):
    """Eigenvalues ``u -/+ sqrt(h)/F`` of the flux Jacobian."""
    h = _check_positive(h)
    u = np.asarray(q, dtype=float) / h
    a = np.sqrt(h) / froude
    return u - a, u + a


def flux_jacobian(h, q, froude: float) -> np.ndarray:
    h = float(_check_positive(h))
    u = q / h
    return np.array([[0.0, 1.0], [h / froude**2 - u * u, 2.0 * u]])


def equilibrium(h):
    """Constant equilibrium state ``(h, h**1.5)``."""
    h = _check_positive(h)
    return h, h**1.5
