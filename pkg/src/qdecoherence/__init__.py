"""Nonextensive (q-parametrized) density-operator dynamics and trapped-ion
Rabi decoherence."""

from .core import (DensityMatrix, NumberDistribution, coherent_distribution, fock_distribution,
                   laguerre_assoc, q_exp, tsallis_entropy)
from .errors import (BranchCutError, DivergentHorizon, GridMismatch, NotHermitian, NumericError,
                     PoleError, StepSizeError, TruncationError)
from .liouville import (EnergyDecomposition, EvolutionResult, Milburn, QExponential, QShortTime,
                        Unitary, coherence_envelope, coherence_phase, diagonalize, evolve,
                        evolve_milburn, evolve_qexp, evolve_qshort, evolve_unitary,
                        integrate_generalized_vn, integrate_milburn, validity_horizon)
from .series import TimeSeries
from .trapped_ion import (Coherent, EmpiricalDecay, Fock, IonConfig, blue_sideband_block,
                          pg_empirical, pg_from_propagator, pg_qmodel, rabi_frequency)

__version__ = "0.1.0"
