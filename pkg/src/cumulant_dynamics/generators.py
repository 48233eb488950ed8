"""Bohr decomposition, cumulant and Davies generators, and state propagation.

Interaction-picture generators act on ``rho~(t) = U(t)^dag rho(t) U(t)``
with ``U(t) = exp(-i H_S t)``; both pictures coincide at t = 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .analysis import TimeSeries, state_diagnostics, validate_density_matrix
from .bath import BathModel, rate_R
from .linalg import (apply_super, check_hermitian, commutator_super, dissipator_super,
                     hermitian_eig, matrix_exp, unvec, vec)
from .rates import QuadratureConfig, RateKernel, assemble_gamma_matrix

CUMULANT_METHODS = ("exact_cutoff", "star", "doublestar")
DAVIES_METHODS = ("davies_global", "davies_local")


class InvariantViolation(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class SystemModel:
    H: np.ndarray
    couplings: tuple
    hermitian_couplings: bool = True

    def __post_init__(self):
        H = check_hermitian(self.H, name="H_S")
        cs = tuple(np.asarray(A, dtype=complex) for A in self.couplings)
        if not cs:
            raise ValueError("need at least one coupling operator")
        for k, A in enumerate(cs):
            if A.shape != H.shape:
                raise ValueError(f"coupling {k} has shape {A.shape}, H_S has {H.shape}")
            if self.hermitian_couplings:
                check_hermitian(A, name=f"coupling {k}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "couplings", cs)

    @property
    def dim(self):
        return self.H.shape[0]


@dataclass(frozen=True)
class BohrDecomposition:
    energies: np.ndarray
    projectors: tuple
    frequencies: np.ndarray
    jump_ops: np.ndarray  # [coupling, frequency, d, d]

    @property
    def n_couplings(self):
        return self.jump_ops.shape[0]

    def index(self, omega, tol=1e-9):
        k = int(np.argmin(np.abs(self.frequencies - omega)))
        if abs(self.frequencies[k] - omega) > tol * max(1.0, abs(omega)):
            raise KeyError(f"no Bohr frequency {omega}")
        return k

    def jump(self, i, omega):
        return self.jump_ops[i, self.index(omega)]


def _cluster_sorted(values, tol):
    """Split a sorted 1-D sequence where consecutive gaps exceed ``tol``."""
    groups = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] > tol:
            groups.append([])
        groups[-1].append(k)
    return groups


def bohr_decompose(system, tol_freq=None):
    """Jump operators ``A_i(w) = sum_{e' - e = w} P(e) A_i P(e')``."""
    H = system.H
    if tol_freq is None:
        tol_freq = 1e-9 * max(float(np.linalg.norm(H, 2)), 1.0)
    w, V = hermitian_eig(H)
    clusters = _cluster_sorted(w, tol_freq)
    energies = np.array([w[c].mean() for c in clusters])
    projectors = tuple(V[:, c] @ V[:, c].conj().T for c in clusters)

    raw = []  # (omega, e_index, e'_index)
    for a, Pa in enumerate(projectors):
        for b, Pb in enumerate(projectors):
            raw.append((energies[b] - energies[a], a, b))
    raw.sort(key=lambda r: r[0])
    omegas_sorted = [r[0] for r in raw]
    freq_groups = _cluster_sorted(omegas_sorted, tol_freq)

    freqs, ops = [], []
    for grp in freq_groups:
        omega = float(np.mean([omegas_sorted[k] for k in grp]))
        blocks = []
        for A in system.couplings:
            B = np.zeros_like(A)
            for k in grp:
                _, a, b = raw[k]
                B = B + projectors[a] @ A @ projectors[b]
            blocks.append(B)
        scale = max(1.0, max(float(np.linalg.norm(A)) for A in system.couplings))
        if max(float(np.linalg.norm(B)) for B in blocks) <= 1e-12 * scale:
            continue
        freqs.append(0.0 if abs(omega) <= tol_freq else omega)
        ops.append(blocks)
    jump_ops = np.array(ops, dtype=complex).transpose(1, 0, 2, 3)
    return BohrDecomposition(energies, projectors, np.array(freqs), jump_ops)


@dataclass(frozen=True)
class FrequencyGrouping:
    groups: tuple          # tuple of tuples of frequency indices into dec.frequencies
    means: np.ndarray
    delta_omega: float     # largest spread inside a group
    delta_Omega: float     # smallest gap between group means

    @property
    def well_separated_ratio(self):
        if not math.isfinite(self.delta_Omega):
            return 0.0
        return self.delta_omega / self.delta_Omega


def default_gap_threshold(frequencies):
    """Geometric mean of the two gap scales when frequencies show two of them.

    Falls back to half the smallest gap (every frequency its own group) when
    no jump of at least a factor 10 separates the sorted gaps.
    """
    f = np.sort(np.asarray(frequencies, dtype=float))
    if f.size < 2:
        return 1.0
    gaps = np.sort(np.diff(f))
    ratios = gaps[1:] / np.maximum(gaps[:-1], 1e-300)
    if ratios.size and ratios.max() >= 10.0:
        k = int(np.argmax(ratios))
        return float(math.sqrt(gaps[k] * gaps[k + 1]))
    return 0.5 * float(gaps[0])


def group_frequencies(dec, gap_threshold=None):
    if gap_threshold is None:
        gap_threshold = default_gap_threshold(dec.frequencies)
    if not gap_threshold > 0:
        raise ValueError("gap_threshold must be positive")
    freqs = np.asarray(dec.frequencies)
    if freqs.size < 1:
        raise ValueError("no Bohr frequencies to group")
    order = np.argsort(freqs)
    clusters = _cluster_sorted(freqs[order], gap_threshold)
    groups = tuple(tuple(int(order[k]) for k in c) for c in clusters)
    means = np.array([freqs[list(g)].mean() for g in groups])
    spread = max(float(freqs[list(g)].max() - freqs[list(g)].min()) for g in groups)
    gap = float(np.min(np.diff(means))) if means.size > 1 else math.inf
    grouping = FrequencyGrouping(groups, means, spread, gap)
    if spread > gap:
        raise ValueError(f"groups are not separated: intra-group spread {spread:.3g} "
                         f"exceeds inter-group gap {gap:.3g}")
    if grouping.well_separated_ratio > 0.1:
        warnings.warn(f"frequency groups are only weakly separated "
                      f"(spread/gap = {grouping.well_separated_ratio:.3g})", stacklevel=2)
    return grouping


def local_jump_ops(dec, grouping, i):
    """Map each group mean to the summed jump operator of coupling ``i``."""
    return {float(m): dec.jump_ops[i, list(g)].sum(axis=0)
            for g, m in zip(grouping.groups, grouping.means)}


def _gklsuper(ops, G):
    """sum_ab G[a, b] D[ops[a], ops[b]] for a list of operators."""
    d = ops[0].shape[0]
    S = np.zeros((d * d, d * d), dtype=complex)
    for a, A in enumerate(ops):
        for b, B in enumerate(ops):
            if G[a, b] != 0:
                S += G[a, b] * dissipator_super(A, B)
    return S


def _flat_ops(dec):
    # composite index k * n + i, matching assemble_gamma_matrix
    return [dec.jump_ops[i, k] for k in range(dec.frequencies.size)
            for i in range(dec.n_couplings)]


def cumulant_generator(dec, kernel, t, log=None):
    """Interaction-picture generator K(t) of the second-order cumulant map."""
    if t < 0:
        raise ValueError("t must be non-negative")
    G = assemble_gamma_matrix(kernel, dec.frequencies, dec.n_couplings, t, log)
    return _gklsuper(_flat_ops(dec), G)


def davies_global_generator(dec, bath):
    """Fully secular dissipator (interaction picture, no Hamiltonian part)."""
    d = dec.jump_ops.shape[-1]
    S = np.zeros((d * d, d * d), dtype=complex)
    for k, omega in enumerate(dec.frequencies):
        rates = 2 * math.pi * rate_R(bath, float(omega)).T
        ops = [dec.jump_ops[i, k] for i in range(dec.n_couplings)]
        S += _gklsuper(ops, rates)
    return S


def davies_local_generator(dec, grouping, bath, H):
    """Schrodinger-picture local generator: -i[H, .] plus grouped dissipators."""
    H = np.asarray(H, dtype=complex)
    S = commutator_super(H)
    for g, m in zip(grouping.groups, grouping.means):
        rates = 2 * math.pi * rate_R(bath, float(m)).T
        ops = [dec.jump_ops[i, list(g)].sum(axis=0) for i in range(dec.n_couplings)]
        S = S + _gklsuper(ops, rates)
    return S


class Dynamics(NamedTuple):
    interaction: TimeSeries
    schrodinger: TimeSeries


def _normalise_method(method):
    m = method.replace("-", "_")
    if m not in CUMULANT_METHODS + DAVIES_METHODS:
        raise ValueError(f"unknown method {method!r}")
    return m


def free_unitary(H, t):
    w, V = hermitian_eig(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def propagate(system, method, rho0, times, bath, *, quadrature=None, grouping=None,
              gap_threshold=None, dec=None, log=None, check=True, metadata=None):
    """Evolve ``rho0`` on a time grid and return both pictures.

    Cumulant methods build a fresh map ``exp(K(t_k))`` for every grid point
    (the family is not a semigroup); Davies methods exponentiate a fixed
    generator.  With ``check`` every output state must have unit trace
    (1e-9) and eigenvalues above -1e-8, else :class:`InvariantViolation`.
    """
    method = _normalise_method(method)
    rho0 = validate_density_matrix(rho0, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-12)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if dec is None:
        dec = bohr_decompose(system)
    if rho0.shape[0] != system.dim:
        raise ValueError("initial state dimension does not match the system")
    H = system.H
    v0 = vec(rho0)
    tilde = np.empty((times.size,) + rho0.shape, dtype=complex)
    schro = np.empty_like(tilde)

    if method in CUMULANT_METHODS:
        kernel = RateKernel(method, bath, quadrature or QuadratureConfig())
        for k, t in enumerate(times):
            K = cumulant_generator(dec, kernel, t, log)
            tilde[k] = unvec(matrix_exp(K) @ v0)
            U = free_unitary(H, t)
            schro[k] = U @ tilde[k] @ U.conj().T
    elif method == "davies_global":
        L = davies_global_generator(dec, bath)
        for k, t in enumerate(times):
            tilde[k] = unvec(matrix_exp(t * L) @ v0)
            U = free_unitary(H, t)
            schro[k] = U @ tilde[k] @ U.conj().T
    else:
        if grouping is None:
            grouping = group_frequencies(dec, gap_threshold)
        L = davies_local_generator(dec, grouping, bath, H)
        for k, t in enumerate(times):
            schro[k] = unvec(matrix_exp(t * L) @ v0)
            U = free_unitary(H, t)
            tilde[k] = U.conj().T @ schro[k] @ U

    if check:
        for k in range(times.size):
            diag = state_diagnostics(schro[k])
            if diag["trace_defect"] > 1e-9 or diag["min_eigenvalue"] < -1e-8:
                raise InvariantViolation(
                    f"{method}: invalid state at t={times[k]:.6g}: {diag}",
                    diagnostics={"t": float(times[k]), **diag})
    meta = {"method": method, **(metadata or {})}
    return Dynamics(TimeSeries(times, tilde, "interaction", meta),
                    TimeSeries(times, schro, "schrodinger", meta))
