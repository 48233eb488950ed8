"""Prebuilt system-bath models in units of the reference frequency w0 = 1."""
from __future__ import annotations

import math

import numpy as np

from .bath import BathModel, SpectralDensity
from .generators import SystemModel

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SIGMA_PLUS = SIGMA_MINUS.T.copy()

# Basis orders: two-level (e, g); three-level (w2, w1, g).
SPIN_E, SPIN_G = 0, 1
QUTRIT_W2, QUTRIT_W1, QUTRIT_G = 0, 1, 2


def spin_boson(alpha=0.05, T_eff=1.0, kind="ohmic", omega_c=None):
    """Two-level system H = sigma_z / 2 coupled through sigma_x."""
    system = SystemModel(0.5 * SIGMA_Z, (SIGMA_X,))
    bath = BathModel(SpectralDensity(kind, alpha, omega_c), temperature=T_eff)
    return system, bath


def qutrit_boson(alpha=0.05, T_eff=1.0, delta_omega=2 * math.pi * 1e-2):
    """V-type three-level system with two nearly degenerate excited levels.

    Both excited levels couple to the ground state through the same
    Hermitian operator ``|g><w2| + |g><w1| + h.c.``; the bath is plain ohmic.
    """
    if not 0 < delta_omega < 2:
        raise ValueError(f"delta_omega must lie in (0, 2), got {delta_omega}")
    H = np.diag([1 + delta_omega / 2, 1 - delta_omega / 2, 0.0]).astype(complex)
    A = np.zeros((3, 3), dtype=complex)
    A[QUTRIT_G, QUTRIT_W2] = A[QUTRIT_G, QUTRIT_W1] = 1.0
    A = A + A.T
    system = SystemModel(H, (A,))
    bath = BathModel(SpectralDensity("ohmic", alpha), temperature=T_eff)
    return system, bath


def projector(d, k):
    P = np.zeros((d, d), dtype=complex)
    P[k, k] = 1.0
    return P


def preset_state(name, d):
    """Named initial states used by the runner and the demos."""
    if name == "maximally_mixed":
        return np.eye(d, dtype=complex) / d
    if name == "uniform":
        return np.full((d, d), 1.0 / d, dtype=complex)
    if name == "ground":
        return projector(d, d - 1)
    if name == "excited":
        return projector(d, 0)
    if d == 2 and name in ("y_plus", "y_minus"):
        sign = 1 if name == "y_plus" else -1
        return 0.5 * (np.eye(2) + sign * SIGMA_Y)
    raise ValueError(f"unknown initial-state preset {name!r} for dimension {d}")
