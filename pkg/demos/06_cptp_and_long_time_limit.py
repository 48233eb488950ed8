"""
Complete positivity and the long-time Davies limit
==================================================

The star and double-star generators give CPTP maps at every time, and
K(t)/t approaches the Davies generator; the relaxed state is the Gibbs state.
"""
import numpy as np

from cumulant_dynamics import (RateKernel, bohr_decompose, cumulant_generator,
                               davies_global_generator, gibbs_state, is_cptp, matrix_exp,
                               spin_boson, trace_distance)
from cumulant_dynamics.generators import free_unitary
from cumulant_dynamics.linalg import unvec, vec

system, bath = spin_boson(alpha=0.05, T_eff=1.0)
dec = bohr_decompose(system)
L = davies_global_generator(dec, bath)

#%%
for method in ("star", "doublestar"):
    kernel = RateKernel(method, bath)
    for t in (0.1, 1.0, 10.0, 100.0, 500.0):
        K = cumulant_generator(dec, kernel, t)
        rep = is_cptp(matrix_exp(K))
        rel = np.linalg.norm(K / t - L) / np.linalg.norm(L)
        print(f"{method:>10} t={t:6.1f}: CPTP={rep.is_cptp} "
              f"min Choi eig={rep.min_eigenvalue: .2e}  |K/t - L|/|L|={rel:.2e}")

#%%
t = 500.0
E = matrix_exp(cumulant_generator(dec, RateKernel("star", bath), t))
U = free_unitary(system.H, t)
rho_t = U @ unvec(E @ vec(np.array([[0.9, 0.3], [0.3, 0.1]]))) @ U.conj().T
print("distance to Gibbs state:", trace_distance(rho_t, gibbs_state(system.H, 1.0)))
