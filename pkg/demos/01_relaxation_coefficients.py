"""
Relaxation coefficients: exact cut-off, star, double-star
=========================================================

The cumulant generator is built from coefficients gamma(w, w', t). Here we
compare the three constructions for the spin-boson bath and check the exact
cut-off coefficient against a brute-force double time integral.
"""
import sys
from pathlib import Path

import numpy as np

from cumulant_dynamics import RateKernel, gamma_doublestar, gamma_exact_cutoff, gamma_star
from cumulant_dynamics import spin_boson

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import gamma_time_domain  # noqa: E402

#%%
# Diagonal coefficients grow linearly in t; the slope is the Markov rate 2 pi R(w).
_, bath = spin_boson(alpha=0.05, T_eff=1.0)
_, cut = spin_boson(alpha=0.05, T_eff=1.0, kind="ohmic-exponential-cutoff", omega_c=5.0)
star, dstar = RateKernel("star", bath), RateKernel("doublestar", bath)
exact = RateKernel("exact_cutoff", cut)

print(f"{'t':>6} {'star/t':>10} {'dstar/t':>10} {'exact(wc=5)/t':>14}")
for t in (0.5, 2.0, 10.0, 50.0, 250.0):
    print(f"{t:6.1f} {gamma_star(star, 1.0, 1.0, t).real / t:10.5f} "
          f"{gamma_doublestar(dstar, 1.0, 1.0, t).real / t:10.5f} "
          f"{gamma_exact_cutoff(exact, 1.0, 1.0, t).real / t:14.5f}")
print("2 pi R(1) =", 2 * np.pi * bath.R(1.0))

#%%
# Cross terms between w = -1 and w = +1 are suppressed like sinc(t).
for t in (1.0, 5.0, 25.0):
    print(t, abs(gamma_star(star, -1.0, 1.0, t)), abs(gamma_doublestar(dstar, -1.0, 1.0, t)))

#%%
# Frequency-domain quadrature versus the time-domain definition.
pairs = [(1.0, 1.0), (-1.0, 1.0), (0.3, 2.0)]
for t in (0.5, 2.0, 8.0):
    ref = gamma_time_domain(pairs, t, 0.05, 1.0, 5.0)
    got = np.array([gamma_exact_cutoff(exact, w, wp, t) for w, wp in pairs])
    print(f"t={t}: max deviation {np.abs(got - ref).max():.2e}")
