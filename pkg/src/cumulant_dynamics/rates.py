"""Time-dependent relaxation coefficients gamma_ij(w, w', t).

Four kernels are provided:

* ``exact_cutoff`` -- the frequency-domain integral of the cumulant
  coefficients for a bath with an explicit cut-off,
* ``star`` -- closed form built from PSD square roots of R at the two
  Bohr frequencies,
* ``doublestar`` -- thermal part integrated numerically, vacuum part in
  closed form,
* ``markov`` -- the time-independent rates ``2 pi R(w)``.

Index convention: ``gamma_ij`` pairs with ``R_ji``, so matrix-valued results
are returned as the transpose of the corresponding bath matrix.  For scalar
baths the functions return complex numbers.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .bath import BathModel, rate_R, satisfies_decay_condition
from .linalg import psd_sqrt

METHODS = ("exact_cutoff", "star", "doublestar", "markov")
TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    def __init__(self, message, interval=None, achieved=None):
        super().__init__(message)
        self.interval = interval
        self.achieved = achieved


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_subdivisions: int = 200
    tail_epsilon: float = 1e-12

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_subdivisions", "tail_epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class QuadratureLog:
    """Accumulates error estimates over many integrals (one per run)."""
    n_integrals: int = 0
    max_abserr: float = 0.0
    worst_interval: tuple = ()
    max_tail_bound: float = 0.0
    warnings: list = field(default_factory=list)

    def record(self, abserr, interval, tail_bound=0.0):
        self.n_integrals += 1
        if abserr > self.max_abserr:
            self.max_abserr = abserr
            self.worst_interval = tuple(float(x) for x in interval)
        self.max_tail_bound = max(self.max_tail_bound, tail_bound)

    def as_dict(self):
        return {
            "n_integrals": self.n_integrals,
            "max_abserr": self.max_abserr,
            "worst_interval": list(self.worst_interval),
            "max_tail_bound": self.max_tail_bound,
            "warnings": list(self.warnings[:20]),
        }


@dataclass(frozen=True)
class RateKernel:
    method: str
    bath: BathModel
    quadrature: QuadratureConfig = QuadratureConfig()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "exact_cutoff" and not self.bath.spectral.has_cutoff:
            raise ValueError(
                "exact_cutoff needs a spectral density with a cut-off: "
                "the integral diverges for a plain ohmic bath")
        if self.method == "doublestar" and not satisfies_decay_condition(self.bath):
            raise ValueError("doublestar needs a bath with W J(W) N(T, W) -> 0")

    def gamma(self, omega, omega_p, t, log=None):
        return _BLOCKS[self.method](self, omega, omega_p, t, log)


def sinc(x):
    """sin(x)/x with the removable singularity handled by its series."""
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _phase(omega, omega_p, t):
    return cmath.exp(0.5j * (omega_p - omega) * t)


def heaviside(x):
    return 1.0 if x > 0 else 0.0


# -- oscillatory integral ----------------------------------------------------

def _quad(f, lo, hi, cfg, log, **kw):
    limit = kw.pop("limit", cfg.max_subdivisions)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                             limit=limit, full_output=1, **kw)
    value, abserr = out[0], out[1]
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(value))
    if len(out) > 3 and abserr > tol:
        msg = str(out[3]).splitlines()[0] if out[3] else "quadrature did not converge"
        if abserr > 1e3 * tol:
            raise QuadratureError(
                f"quadrature on [{lo:.6g}, {hi:.6g}] failed: {msg} "
                f"(abserr {abserr:.3e} > tol {tol:.3e})",
                interval=(lo, hi), achieved=abserr)
        if log is not None:
            log.warnings.append(f"[{lo:.6g}, {hi:.6g}]: {msg}")
    if log is not None:
        log.record(abserr, (lo, hi))
    return value, abserr


def _truncation_point(weight, start, end, eps):
    """Smallest X >= start (bracketed by doubling) past which weight < eps."""
    if weight(start) < eps and weight(2 * start) < eps:
        return start
    hi = max(start, 1.0)
    while weight(hi) >= eps:
        hi *= 2.0
        if hi > 1e12:
            raise QuadratureError("weight does not decay; cannot truncate the tail")
        if hi >= end:
            return end
    lo = hi / 2.0
    while weight(lo) < eps and lo > start:
        lo /= 2.0
    lo = max(lo, start)
    if weight(lo) < eps:
        return lo
    return optimize.brentq(lambda x: math.log(max(weight(x), 1e-300)) - math.log(eps),
                           lo, hi, xtol=1e-6 * hi)


def sinc_product_integral(weight, a, b, t, end=math.inf, cfg=QuadratureConfig(),
                          log=None, decay_scale=None):
    """Integral over x in [0, end] of ``weight(x) S(a - x) S(b - x)``.

    Here ``S(y) = t sinc(y t / 2)``.  ``weight`` must be bounded and, for an
    infinite ``end``, decay fast enough for the tail truncation at
    ``weight < cfg.tail_epsilon``.  ``decay_scale`` (a length over which the
    weight decays at least exponentially) turns the truncation into a
    recorded bound on the neglected tail.

    The region near the two sinc peaks is integrated with breakpoints at the
    sinc zeros; past it the product of sines is expanded into a smooth part
    and cos(x t), sin(x t) parts handled by QUADPACK's oscillatory rule.
    """
    if t == 0:
        return 0.0
    if t < 0:
        raise ValueError("t must be non-negative")
    half = 0.5 * t

    def f(x):
        return weight(x) * t * sinc((a - x) * half) * t * sinc((b - x) * half)

    period = TWO_PI / t
    near_end = min(max(a, b, 0.0) + max(2.0, 2.0 * period), end)
    nodes = set()
    for c in (a, b):
        k0 = math.ceil(-c / period)
        k1 = math.floor((near_end - c) / period)
        for k in range(k0, k1 + 1):
            x = c + k * period
            if 0.0 < x < near_end:
                nodes.add(round(x, 12))
    if math.isfinite(end) and 0.0 < end < near_end:
        nodes.add(end)
    nodes = sorted(nodes)
    kw = {}
    if nodes:
        kw = {"points": nodes, "limit": max(cfg.max_subdivisions, 3 * len(nodes) + 50)}
    total, _ = _quad(f, 0.0, near_end, cfg, log, **kw)

    if near_end >= end:
        return total

    tail_end = end
    tail_bound = 0.0
    if not math.isfinite(end):
        tail_end = _truncation_point(weight, near_end, math.inf, cfg.tail_epsilon)
        if decay_scale is not None:
            X = tail_end
            w_X = weight(X)
            tail_bound = 4.0 * w_X * (decay_scale + decay_scale ** 2 / X) / ((X - a) * (X - b))
        if log is not None:
            log.max_tail_bound = max(log.max_tail_bound, tail_bound)
    if tail_end <= near_end:
        return total

    def g(x):
        return 2.0 * weight(x) / ((x - a) * (x - b))

    c = (a + b) * half
    cos_d = math.cos((a - b) * half)
    cos_c, sin_c = math.cos(c), math.sin(c)
    lo = near_end
    while lo < tail_end:
        hi = min(2.0 * lo, tail_end)
        smooth, _ = _quad(g, lo, hi, cfg, log)
        osc_c, _ = _quad(g, lo, hi, cfg, log, weight="cos", wvar=t)
        osc_s, _ = _quad(g, lo, hi, cfg, log, weight="sin", wvar=t)
        total += cos_d * smooth - cos_c * osc_c - sin_c * osc_s
        lo = hi
    return total


# -- kernels -----------------------------------------------------------------

def _decay_scale(bath, vacuum):
    spec = bath.spectral
    scales = []
    if spec.kind == "ohmic-exponential-cutoff":
        scales.append(spec.omega_c)
    if not vacuum and bath.local_temperature is None and bath.temperature > 0:
        scales.append(bath.temperature)
    return min(scales) if scales else None


def _half_line_pair(kernel, omega, omega_p, t, log, vacuum_weight):
    """Positive- and negative-frequency halves of the double-sinc integral.

    Returns ``(I_plus, I_minus)`` where ``I_plus`` integrates the weight
    ``J (N + 1)`` (or ``J N`` when ``vacuum_weight`` is False) over W > 0
    and ``I_minus`` integrates ``J N`` over W < 0.
    """
    bath = kernel.bath
    cfg = kernel.quadrature
    end = bath.spectral.support_end
    thermal = bath.temperature > 0 or bath.local_temperature is not None
    if vacuum_weight:
        w_plus = bath.R
        scale_plus = _decay_scale(bath, vacuum=True)
    else:
        w_plus = bath.thermal_weight
        scale_plus = _decay_scale(bath, vacuum=False)
    I_plus = 0.0
    if vacuum_weight or thermal:
        I_plus = sinc_product_integral(w_plus, omega, omega_p, t, end, cfg, log, scale_plus)
    I_minus = 0.0
    if thermal:
        I_minus = sinc_product_integral(bath.thermal_weight, -omega, -omega_p, t, end, cfg, log,
                                        _decay_scale(bath, vacuum=False))
    return I_plus, I_minus


def _combine(bath, phase, I_plus, I_minus):
    if bath.is_scalar:
        return np.array([[phase * (I_plus + I_minus)]], dtype=complex)
    C = np.asarray(bath.coupling, dtype=complex)
    return phase * (I_plus * C.T + I_minus * C)


def _exact_block(kernel, omega, omega_p, t, log=None):
    if t == 0:
        return np.zeros((kernel.bath.n_channels,) * 2, dtype=complex)
    I_plus, I_minus = _half_line_pair(kernel, omega, omega_p, t, log, vacuum_weight=True)
    return _combine(kernel.bath, _phase(omega, omega_p, t), I_plus, I_minus)


def _star_block(kernel, omega, omega_p, t, log=None):
    n = kernel.bath.n_channels
    if t == 0:
        return np.zeros((n, n), dtype=complex)
    pref = TWO_PI * t * _phase(omega, omega_p, t) * sinc(0.5 * (omega_p - omega) * t)
    bath = kernel.bath
    if bath.is_scalar:
        return np.array([[pref * math.sqrt(bath.R(omega_p) * bath.R(omega))]], dtype=complex)
    M = psd_sqrt(rate_R(bath, omega_p)) @ psd_sqrt(rate_R(bath, omega))
    return pref * M.T


def _doublestar_block(kernel, omega, omega_p, t, log=None):
    bath = kernel.bath
    n = bath.n_channels
    if t == 0:
        return np.zeros((n, n), dtype=complex)
    phase = _phase(omega, omega_p, t)
    I_plus, I_minus = _half_line_pair(kernel, omega, omega_p, t, log, vacuum_weight=False)
    out = _combine(bath, phase, I_plus, I_minus)
    if omega > 0 and omega_p > 0:
        pref = TWO_PI * t * phase * sinc(0.5 * (omega_p - omega) * t)
        if bath.is_scalar:
            out = out + pref * math.sqrt(bath.J(omega_p) * bath.J(omega))
        else:
            M = math.sqrt(bath.J(omega_p) * bath.J(omega)) * np.asarray(bath.coupling)
            out = out + pref * M.T
    return out


def _markov_block(kernel, omega, omega_p=None, t=None, log=None):
    return TWO_PI * rate_R(kernel.bath, omega).T


_BLOCKS = {
    "exact_cutoff": _exact_block,
    "star": _star_block,
    "doublestar": _doublestar_block,
    "markov": lambda k, w, wp, t, log=None: (
        _markov_block(k, w) if w == wp else np.zeros((k.bath.n_channels,) * 2, dtype=complex)),
}


def _unwrap(kernel, block):
    return complex(block[0, 0]) if kernel.bath.is_scalar else block


def _require(kernel, method):
    if kernel.method != method:
        raise ValueError(f"kernel method is {kernel.method!r}, expected {method!r}")


def gamma_exact_cutoff(kernel, omega, omega_p, t, log=None):
    """Cumulant coefficient for a bath with an explicit cut-off."""
    _require(kernel, "exact_cutoff")
    if t < 0:
        raise ValueError("t must be non-negative")
    return _unwrap(kernel, _exact_block(kernel, omega, omega_p, t, log))


def gamma_star(kernel, omega, omega_p, t):
    if t < 0:
        raise ValueError("t must be non-negative")
    return _unwrap(kernel, _star_block(kernel, omega, omega_p, t))


def gamma_doublestar(kernel, omega, omega_p, t, log=None):
    if t < 0:
        raise ValueError("t must be non-negative")
    if not satisfies_decay_condition(kernel.bath):
        raise ValueError("doublestar needs a bath with W J(W) N(T, W) -> 0")
    return _unwrap(kernel, _doublestar_block(kernel, omega, omega_p, t, log))


def gamma_markov(kernel, omega):
    """Markovian rate ``2 pi R(omega)`` (transposed for matrix baths)."""
    return _unwrap(kernel, _markov_block(kernel, omega))


def assemble_gamma_matrix(kernel, omegas, n_indices, t, log=None):
    """Hermitian coefficient matrix over the composite index ``(omega, i)``.

    Row ``k * n_indices + i`` belongs to frequency ``omegas[k]`` and coupling
    ``i``.  Only blocks with ``k <= l`` are computed; the rest follow from
    Hermiticity.  For ``markov`` the result is block-diagonal and carries no
    factor of t.
    """
    omegas = [float(w) for w in omegas]
    if not omegas:
        raise ValueError("need at least one Bohr frequency")
    if len(set(omegas)) != len(omegas):
        raise ValueError("Bohr frequencies must be deduplicated")
    if n_indices != kernel.bath.n_channels:
        raise ValueError(
            f"bath has {kernel.bath.n_channels} channels but {n_indices} coupling operators given")
    n = n_indices
    m = len(omegas)
    G = np.zeros((m * n, m * n), dtype=complex)
    if kernel.method != "markov" and t == 0:
        return G
    block = _BLOCKS[kernel.method]
    for k in range(m):
        for l in range(k, m):
            B = block(kernel, omegas[k], omegas[l], t, log)
            G[k * n:(k + 1) * n, l * n:(l + 1) * n] = B
            if l != k:
                G[l * n:(l + 1) * n, k * n:(k + 1) * n] = B.conj().T
    # diagonal blocks are Hermitian analytically; remove round-off asymmetry
    return 0.5 * (G + G.conj().T)
