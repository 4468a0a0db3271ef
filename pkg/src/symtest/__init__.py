"""Numerical tests of Hamiltonian symmetry under finite groups of unitaries."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .group import GateSpec, GroupRep, close_generators, group_projector, twirl
from .hamiltonian import (
    HamiltonianSpec,
    PauliTerm,
    TrotterPlan,
    build_nmr_hamiltonian,
    pauli_sum_to_matrix,
    trotter_error,
    trotter_evolution,
)
from .numerics import expm_hermitian_evolution, hs_norm, nested_commutator, spectral_norm
from .simulator import CircuitInstance, ShotRecord, sample_shots, simulate_exact
from .symcore import (
    BoundSet,
    acceptance_probability_choi,
    acceptance_probability_series,
    acceptance_probability_trace,
    fixed_state_acceptance,
    gentle_measurement_check,
    optimal_acceptance_exact,
    second_order_acceptance,
    variational_lower_bounds,
)
from .variational import Ansatz, OptimizerConfig, ansatz_prepare, optimize_acceptance, optimize_with_restarts
