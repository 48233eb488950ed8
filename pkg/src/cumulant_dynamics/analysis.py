"""Density-matrix checks, time series, distances and steady-state tools."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitian_eig

PICTURES = ("schrodinger", "interaction")


class InvalidStateError(ValueError):
    pass


def state_diagnostics(rho):
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.linalg.norm(rho - rho.conj().T))
    trace_defect = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return {"hermiticity_defect": herm, "trace_defect": trace_defect, "min_eigenvalue": min_eig}


def validate_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-8):
    """Return ``rho`` as a complex array or raise :class:`InvalidStateError`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    diag = state_diagnostics(rho)
    if (diag["hermiticity_defect"] > herm_tol or diag["trace_defect"] > trace_tol
            or diag["min_eigenvalue"] < -psd_tol):
        raise InvalidStateError(f"not a valid density matrix: {diag}")
    return rho


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    states: np.ndarray
    picture: str = "schrodinger"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if self.picture not in PICTURES:
            raise ValueError(f"picture must be one of {PICTURES}")
        if times.ndim != 1 or states.ndim != 3 or states.shape[0] != times.size:
            raise ValueError("need one d x d state per time point")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dim(self):
        return self.states.shape[1]

    def __len__(self):
        return self.times.size

    def diagnostics(self):
        return [state_diagnostics(r) for r in self.states]


def trace_distance(rho, sigma):
    """Half the trace norm of rho - sigma."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    # fixed operand order makes the result exactly symmetric
    if rho.tobytes() > sigma.tobytes():
        rho, sigma = sigma, rho
    diff = rho - sigma
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * math.fsum(np.abs(w))


@dataclass(frozen=True)
class WitnessReport:
    distances: np.ndarray
    total_increase: float
    increase_intervals: list
    monotone: bool

    def as_dict(self):
        return {"monotone": self.monotone, "total_increase": self.total_increase,
                "increase_intervals": [list(iv) for iv in self.increase_intervals]}


def nonmarkovianity_witness(series_rho, series_sigma, tol=1e-9):
    """Detect growth of the trace distance between two trajectories.

    ``increase_intervals`` lists maximal ``(t_start, t_end)`` runs of
    consecutive grid steps on which the distance grows.
    """
    if (series_rho.times.shape != series_sigma.times.shape
            or not np.array_equal(series_rho.times, series_sigma.times)):
        raise ValueError("time grids differ")
    if series_rho.picture != series_sigma.picture:
        raise ValueError("pictures differ")
    D = np.array([trace_distance(a, b) for a, b in zip(series_rho.states, series_sigma.states)])
    steps = np.diff(D)
    total = float(np.sum(np.clip(steps, 0.0, None)))
    intervals = []
    start = None
    t = series_rho.times
    for k, dk in enumerate(steps):
        if dk > tol:
            if start is None:
                start = t[k]
            end = t[k + 1]
        elif start is not None:
            intervals.append((float(start), float(end)))
            start = None
    if start is not None:
        intervals.append((float(start), float(end)))
    return WitnessReport(D, total, intervals, total <= tol)


def gibbs_state(H, T_eff):
    """Thermal state of ``H``; at T = 0 the normalised ground-space projector."""
    w, V = hermitian_eig(H)
    if T_eff < 0:
        raise ValueError("temperature must be non-negative")
    if T_eff == 0:
        scale = max(1.0, float(np.max(np.abs(w))))
        p = (w - w[0] <= 1e-9 * scale).astype(float)
    else:
        p = np.exp(-(w - w[0]) / T_eff)
    p = p / p.sum()
    rho = (V * p) @ V.conj().T
    return 0.5 * (rho + rho.conj().T)


def observables(series, selectors):
    """Matrix elements ``rho[r, c]`` over time.

    Returns a dict mapping ``"rho_<r><c>"`` to a ``(n_t, 3)`` array of
    real part, imaginary part and modulus.
    """
    d = series.dim
    out = {}
    for r, c in selectors:
        if not (0 <= r < d and 0 <= c < d):
            raise IndexError(f"selector ({r}, {c}) out of range for dimension {d}")
        v = series.states[:, r, c]
        out[f"rho_{r}{c}"] = np.column_stack([v.real, v.imag, np.abs(v)])
    return out
