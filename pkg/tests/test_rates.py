import cmath
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cumulant_dynamics.bath import BathModel, SpectralDensity
from cumulant_dynamics.rates import (QuadratureConfig, QuadratureError, QuadratureLog,
                                     RateKernel, assemble_gamma_matrix, gamma_doublestar,
                                     gamma_exact_cutoff, gamma_markov, gamma_star, sinc,
                                     sinc_product_integral)
from oracles import gamma_time_domain

DATA = json.loads((Path(__file__).parent / "data" / "oracle_gamma.json").read_text())


def bath(kind="ohmic", T=1.0, alpha=0.05, omega_c=None, coupling=None):
    return BathModel(SpectralDensity(kind, alpha, omega_c), temperature=T, coupling=coupling)


def exp_cutoff(T=1.0, omega_c=5.0):
    return bath("ohmic-exponential-cutoff", T=T, omega_c=omega_c)


def test_sinc_small_argument_branch_is_continuous():
    for x in (1e-5, 9.99e-5, 1.01e-4):
        assert sinc(x) == pytest.approx(math.sin(x) / x, rel=1e-15)
    assert sinc(0.0) == 1.0


def test_sinc_product_integral_against_plain_quad():
    from scipy import integrate
    w = lambda x: math.exp(-x)
    a, b, t = 1.0, 1.5, 3.0
    f = lambda x: w(x) * t * sinc((a - x) * t / 2) * t * sinc((b - x) * t / 2)
    ref, _ = integrate.quad(f, 0, 60, limit=500, epsabs=1e-13, epsrel=1e-12)
    got = sinc_product_integral(w, a, b, t)
    assert got == pytest.approx(ref, abs=1e-10)


def test_sinc_product_integral_finite_support():
    from scipy import integrate
    w = lambda x: x
    a, b, t = 1.0, 2.0, 20.0
    f = lambda x: w(x) * t * sinc((a - x) * t / 2) * t * sinc((b - x) * t / 2)
    ref, _ = integrate.quad(f, 0, 5, limit=2000, epsabs=1e-13, epsrel=1e-12)
    assert sinc_product_integral(w, a, b, t, end=5.0) == pytest.approx(ref, abs=1e-9)


def test_star_closed_form():
    k = RateKernel("star", bath(T=1.0))
    w, wp, t = 1.0, -0.5, 3.0
    R = k.bath.R
    expected = (2 * math.pi * t * cmath.exp(0.5j * (wp - w) * t) * sinc(0.5 * (wp - w) * t)
                * math.sqrt(R(w) * R(wp)))
    assert gamma_star(k, w, wp, t) == pytest.approx(expected, rel=1e-14)


def test_star_diagonal_is_markov_rate_times_t():
    k = RateKernel("star", bath(T=0.7))
    for w in (-2.0, -0.3, 0.0, 1.0, 4.0):
        assert gamma_star(k, w, w, 7.0) == pytest.approx(
            7.0 * gamma_markov(k, w), rel=1e-13)


def test_markov_rate():
    k = RateKernel("markov", bath(T=1.0))
    assert gamma_markov(k, 1.0) == pytest.approx(2 * math.pi * 0.05 / (1 - math.exp(-1)))
    assert gamma_markov(k, -1.0) == pytest.approx(2 * math.pi * 0.05 / (math.e - 1))


@pytest.mark.parametrize("t", [0.5, 2.0, 8.0])
def test_exact_cutoff_matches_time_domain_oracle(t):
    k = RateKernel("exact_cutoff", exp_cutoff(T=DATA["T_eff"], omega_c=DATA["omega_c"]))
    rows = [r for r in DATA["values"] if r["t"] == t]
    assert len(rows) == 25
    for r in rows:
        got = gamma_exact_cutoff(k, r["omega"], r["omega_p"], t)
        assert abs(got - complex(r["re"], r["im"])) < 1e-9, r


def test_exact_cutoff_zero_temperature_against_oracle():
    k = RateKernel("exact_cutoff", exp_cutoff(T=0.0))
    pairs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)]
    ref = gamma_time_domain(pairs, 3.0, 0.05, 0.0, 5.0)
    got = [gamma_exact_cutoff(k, w, wp, 3.0) for w, wp in pairs]
    np.testing.assert_allclose(got, ref, atol=1e-9)


@pytest.mark.parametrize("t", [0.5, 3.0])
def test_doublestar_thermal_part_matches_oracle(t):
    # the thermal part is kept exact; only the vacuum part is regularised
    k = RateKernel("doublestar", bath(T=1.0))
    pairs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (0.4, 2.0)]
    thermal = gamma_time_domain(pairs, t, 0.05, 1.0, None, vacuum=False)
    for (w, wp), ref in zip(pairs, thermal):
        vac = 0.0
        if w > 0 and wp > 0:
            vac = (2 * math.pi * t * cmath.exp(0.5j * (wp - w) * t) * sinc(0.5 * (wp - w) * t)
                   * 0.05 * math.sqrt(w * wp))
        assert gamma_doublestar(k, w, wp, t) - vac == pytest.approx(ref, abs=1e-9)


def test_doublestar_zero_temperature_is_vacuum_only():
    k = RateKernel("doublestar", bath(T=0.0))
    assert gamma_doublestar(k, -1.0, -1.0, 4.0) == 0.0
    assert gamma_doublestar(k, 1.0, 1.0, 4.0) == pytest.approx(2 * math.pi * 4.0 * 0.05)


def test_doublestar_long_time_rate():
    k = RateKernel("doublestar", bath(T=1.0))
    t = 400.0
    assert gamma_doublestar(k, 1.0, 1.0, t).real / t == pytest.approx(
        gamma_markov(RateKernel("markov", k.bath), 1.0).real, rel=2e-3)


def test_exact_cutoff_sharp_long_time_rate():
    k = RateKernel("exact_cutoff", bath("ohmic-sharp-cutoff", T=0.0, omega_c=5.0))
    assert gamma_exact_cutoff(k, 1.0, 1.0, 2000.0).real / 2000.0 == pytest.approx(
        2 * math.pi * 0.05, rel=1e-3)


def test_exact_cutoff_rejects_plain_ohmic():
    with pytest.raises(ValueError, match="cut-off"):
        RateKernel("exact_cutoff", bath())


def test_unknown_method_and_negative_time():
    with pytest.raises(ValueError):
        RateKernel("triplestar", bath())
    k = RateKernel("star", bath())
    with pytest.raises(ValueError):
        gamma_star(k, 1.0, 1.0, -1.0)


def test_hermitian_symmetry_of_coefficients():
    k = RateKernel("exact_cutoff", exp_cutoff())
    g1 = gamma_exact_cutoff(k, 0.5, 2.0, 1.7)
    g2 = gamma_exact_cutoff(k, 2.0, 0.5, 1.7)
    assert g1 == pytest.approx(g2.conjugate(), abs=1e-13)


def test_quadrature_failure_reports_interval():
    cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=1)
    k = RateKernel("exact_cutoff", exp_cutoff(), cfg)
    with pytest.raises(QuadratureError) as info:
        gamma_exact_cutoff(k, 1.0, 1.0, 50.0)
    assert info.value.interval is not None and info.value.achieved > 0


def test_quadrature_log_collects_estimates():
    log = QuadratureLog()
    k = RateKernel("exact_cutoff", exp_cutoff())
    gamma_exact_cutoff(k, 1.0, -1.0, 5.0, log)
    d = log.as_dict()
    assert d["n_integrals"] > 0 and d["max_abserr"] < 1e-8


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)


def test_assemble_zero_at_t0_and_markov_block_diagonal():
    b = bath(T=1.0)
    G = assemble_gamma_matrix(RateKernel("star", b), [-1.0, 1.0], 1, 0.0)
    np.testing.assert_array_equal(G, 0)
    M = assemble_gamma_matrix(RateKernel("markov", b), [-1.0, 1.0], 1, 3.0)
    np.testing.assert_allclose(M, np.diag([2 * math.pi * b.R(-1.0), 2 * math.pi * b.R(1.0)]))


def test_assemble_rejects_bad_input():
    k = RateKernel("star", bath())
    with pytest.raises(ValueError):
        assemble_gamma_matrix(k, [1.0, 1.0], 1, 1.0)
    with pytest.raises(ValueError):
        assemble_gamma_matrix(k, [1.0], 2, 1.0)


def test_assemble_spin_boson_star_psd():
    G = assemble_gamma_matrix(RateKernel("star", bath(T=1.0)), [-1.0, 1.0], 1, 5.0)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-15)
    assert np.linalg.eigvalsh(G)[0] >= -1e-10


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.01, 300.0), T=st.floats(0.0, 8.0),
       omegas=st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=4, unique=True))
def test_star_matrix_psd_property(t, T, omegas):
    omegas = sorted(set(round(w, 6) for w in omegas))
    G = assemble_gamma_matrix(RateKernel("star", bath(T=T)), omegas, 1, t)
    scale = max(1.0, np.abs(G).max())
    assert np.linalg.eigvalsh(G)[0] >= -1e-12 * scale


@settings(max_examples=10, deadline=None)
@given(t=st.floats(0.05, 60.0), T=st.floats(0.0, 6.0))
def test_doublestar_matrix_psd_property(t, T):
    omegas = [-1.03, -0.97, 0.97, 1.03]
    G = assemble_gamma_matrix(RateKernel("doublestar", bath(T=T)), omegas, 1, t)
    scale = max(1.0, np.abs(G).max())
    assert np.linalg.eigvalsh(G)[0] >= -1e-9 * scale


def test_matrix_bath_reduces_to_scalar_for_one_channel():
    b1 = bath(T=1.0)
    b2 = bath(T=1.0, coupling=np.array([[1.0]]))
    for method in ("star", "doublestar"):
        G1 = assemble_gamma_matrix(RateKernel(method, b1), [-1.0, 1.0], 1, 2.0)
        G2 = assemble_gamma_matrix(RateKernel(method, b2), [-1.0, 1.0], 1, 2.0)
        np.testing.assert_allclose(G1, G2, atol=1e-13)


def test_matrix_bath_star_psd_and_hermitian():
    C = np.array([[1.0, 0.4 + 0.3j], [0.4 - 0.3j, 0.8]])
    k = RateKernel("star", bath(T=1.0, coupling=C))
    G = assemble_gamma_matrix(k, [-1.0, 0.0, 1.0], 2, 4.0)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(G)[0] >= -1e-12
    block = gamma_star(k, 1.0, 1.0, 4.0)
    np.testing.assert_allclose(block, 2 * math.pi * 4.0 * k.bath.R(1.0) * C.T, rtol=1e-13)
