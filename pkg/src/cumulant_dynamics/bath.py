"""Bosonic heat baths: spectral densities, occupations and rate functions.

Units: hbar = k_B = 1, frequencies in units of the reference system frequency
and times in its inverse.

The bath rate function splits into vacuum and thermal parts,

    R(W)  = J(W) (N(T, W) + 1),     R(-W) = J(W) N(T, W),    W > 0,

and matrix-valued baths are written as ``J_ij(W) = C_ij J(W)`` with a
constant Hermitian PSD coupling matrix ``C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import check_hermitian

KINDS = ("ohmic", "ohmic-exponential-cutoff", "ohmic-sharp-cutoff")


@dataclass(frozen=True)
class SpectralDensity:
    kind: str
    alpha: float
    omega_c: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown spectral density kind {self.kind!r}; expected one of {KINDS}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.kind == "ohmic":
            if self.omega_c is not None:
                raise ValueError("plain ohmic spectral density takes no omega_c")
        elif self.omega_c is None or not self.omega_c > 0:
            raise ValueError(f"{self.kind} requires a positive omega_c")

    @property
    def has_cutoff(self):
        return self.kind != "ohmic"

    @property
    def support_end(self):
        """Upper end of the support of J (inf unless the cut-off is sharp)."""
        return self.omega_c if self.kind == "ohmic-sharp-cutoff" else math.inf

    def __call__(self, omega):
        if omega < 0:
            raise ValueError("J is evaluated for omega >= 0 only")
        if self.kind == "ohmic":
            return self.alpha * omega
        if self.kind == "ohmic-exponential-cutoff":
            return self.alpha * omega * math.exp(-omega / self.omega_c)
        return self.alpha * omega if omega <= self.omega_c else 0.0

    def slope_at_zero(self):
        return self.alpha


def occupation(T_eff, omega):
    """Bose-Einstein occupation ``1 / (exp(omega/T) - 1)``."""
    if not omega > 0:
        raise ValueError(f"occupation needs omega > 0, got {omega}")
    if T_eff < 0:
        raise ValueError(f"temperature must be non-negative, got {T_eff}")
    if T_eff == 0:
        return 0.0
    x = omega / T_eff
    # e^{-x} / (1 - e^{-x}) never overflows and keeps precision for small x.
    return math.exp(-x) / -math.expm1(-x)


@dataclass(frozen=True)
class BathModel:
    """A thermal bosonic reservoir.

    ``coupling`` is the optional n x n Hermitian PSD matrix of a bath coupled
    through n system operators; ``None`` means a single scalar channel.
    ``local_temperature`` optionally replaces the constant temperature by a
    frequency-dependent one, T(W) = T(-W).
    """
    spectral: SpectralDensity
    temperature: float = 0.0
    coupling: Optional[np.ndarray] = None
    local_temperature: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be finite and >= 0, got {self.temperature}")
        if self.coupling is not None:
            C = check_hermitian(np.atleast_2d(self.coupling), name="bath coupling matrix")
            if np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0] < -1e-12:
                raise ValueError("bath coupling matrix must be positive semi-definite")
            C = C.copy()
            C.setflags(write=False)
            object.__setattr__(self, "coupling", C)

    @property
    def n_channels(self):
        return 1 if self.coupling is None else self.coupling.shape[0]

    @property
    def is_scalar(self):
        return self.coupling is None

    def T(self, omega):
        if self.local_temperature is None:
            return self.temperature
        return self.local_temperature(abs(omega))

    def J(self, omega):
        return self.spectral(omega)

    def N(self, omega):
        return occupation(self.T(omega), omega)

    def thermal_weight(self, omega):
        """N(T, W) J(W) for W > 0, the integrand weight of stimulated processes."""
        if omega <= 0:
            return 0.0
        T = self.T(omega)
        if T == 0:
            return 0.0
        return self.spectral(omega) * occupation(T, omega)

    def R(self, omega):
        """Scalar rate profile R(W), defined for every real W."""
        if omega == 0:
            # continuity limit of J(W) N(T, W) for J ~ alpha W
            return self.spectral.slope_at_zero() * self.T(0.0)
        if omega > 0:
            if self.T(omega) == 0:
                return self.spectral(omega)
            return self.spectral(omega) * (occupation(self.T(omega), omega) + 1.0)
        return self.thermal_weight(-omega)

    def _matrix(self, value, transpose=False):
        if self.coupling is None:
            return np.array([[value]], dtype=complex)
        C = self.coupling.T if transpose else self.coupling
        return value * np.asarray(C, dtype=complex)


def spectral_J(bath, omega):
    """Matrix-valued spectral density J_ij(W) for W >= 0."""
    if omega < 0:
        raise ValueError("spectral_J takes omega >= 0; use rate_R for negative frequencies")
    return bath._matrix(bath.J(omega))


def rate_R(bath, omega):
    """Matrix-valued rate function with ``R(-W) = J(W)^T N`` for W > 0."""
    return bath._matrix(bath.R(omega), transpose=omega < 0)


def satisfies_decay_condition(bath, probes=(1e2, 1e3, 1e4), tol=1e-8):
    """Probe ``W J(W) N(T, W) -> 0`` at large W."""
    scale = max(1.0, bath.temperature)
    values = [w * scale * bath.thermal_weight(w * scale) for w in probes]
    if not all(math.isfinite(v) for v in values):
        return False
    return values[-1] <= tol * max(1.0, values[0]) or values[-1] == 0.0
