"""
Zero temperature: who excites the ground state?
===============================================

At T = 0 a system prepared in its ground state should stay there. The
regularised maps respect this exactly; the exact cut-off coefficient carries
a negative-frequency vacuum contribution that pumps population upwards,
growing with the cut-off.
"""
import numpy as np

from cumulant_dynamics import propagate, spin_boson
from cumulant_dynamics.models import SPIN_E, preset_state

rho0 = preset_state("ground", 2)
times = np.linspace(0.0, 100.0, 201)
cases = [("star", {}), ("doublestar", {}),
         ("exact-cutoff", dict(kind="ohmic-exponential-cutoff", omega_c=5.0)),
         ("exact-cutoff", dict(kind="ohmic-exponential-cutoff", omega_c=1000.0))]

for method, kw in cases:
    system, bath = spin_boson(alpha=0.05, T_eff=0.0, **kw)
    dyn = propagate(system, method, rho0, times, bath)
    rho_ee = dyn.schrodinger.states[:, SPIN_E, SPIN_E].real
    print(f"{method:>12} {kw.get('omega_c', ''):>7}: max rho_ee = {rho_ee.max():.3e}")
