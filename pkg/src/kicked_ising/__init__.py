"""Kicked infinite-range Ising chain at tau = m*pi/2.

Analytic parity-block Floquet operators, entanglement dynamics for
coherent initial states at any qubit count, operator-period prediction,
and the Poisson-class spectral-statistics diagnostics.
"""

from .dynamics import (EntropySeries, SingleQubitRDM, detect_period,
                       entropy_series, evolve_parity, linear_entropy,
                       single_qubit_rdm, von_neumann_entropy)
from .eigenstates import (EigenstateEnsemble, ScalingPoint, average_ee_ratio,
                          floquet_eigenstates, scaling_series)
from .errors import NumericGuardError, ResourceLimitError
from .floquet import (CouplingSpec, DqTable, FloquetBlocks, deviation,
                      diagonal_blocks, dq_table, evolved_diagonal, gcd_dq,
                      general_tau_blocks, identity_deviation,
                      minimal_period_scan, predicted_period)
from .kicked_top import BlochPoint, TopParams, classical_step, lle_estimate, map_params
from .spectral import (PhaseSpectrum, SpacingSamples, UnfoldedLevels,
                       adjacent_ratio_stats, eigenphases, ks_distance,
                       kth_ratios, kth_spacings, mean_adjacent_ratio,
                       perturbed_rational_spectrum, reference_cdf,
                       reference_pdf, unfold)
from .states import (CoherentParams, ParityState, SchmidtSpectrum,
                     SymmetricState, bipartite_schmidt, coherent_dicke,
                     from_parity, log_binomial, to_parity)

__version__ = "0.1.0"
