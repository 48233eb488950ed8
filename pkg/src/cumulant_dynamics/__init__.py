"""Second-order cumulant dynamics of open quantum systems.

Frequency-domain relaxation coefficients (exact cut-off, star and
double-star regularisations), the cumulant map exp(K(t)), Davies global and
local master equations, and tools to check complete positivity, relaxation
limits and non-Markovianity.
"""
from .analysis import (TimeSeries, gibbs_state, nonmarkovianity_witness, observables,
                       trace_distance, validate_density_matrix)
from .bath import BathModel, SpectralDensity, rate_R, spectral_J
from .generators import (SystemModel, bohr_decompose, cumulant_generator,
                         davies_global_generator, davies_local_generator, group_frequencies,
                         local_jump_ops, propagate)
from .linalg import choi_of, dissipator_super, is_cptp, matrix_exp
from .models import preset_state, qutrit_boson, spin_boson
from .rates import (QuadratureConfig, RateKernel, assemble_gamma_matrix, gamma_doublestar,
                    gamma_exact_cutoff, gamma_markov, gamma_star)

__version__ = "0.1.0"
