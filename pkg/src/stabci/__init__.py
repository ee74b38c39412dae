"""Stabilizer-CI toolkit: stabilizer approximations to molecular ground
states, derived error-detection codes, and noisy preparation experiments."""

from .codes import (
    StabilizerCode,
    build_code,
    build_code_detailed,
    codespace_contains,
    verify_distance,
)
from .hamiltonian import (
    GeneralizedState,
    MoleculeMeta,
    QubitHamiltonian,
    brute_force_ground,
    energy_generalized,
    energy_stabilizer,
    hf_state_for,
    load_hamiltonian,
    optimal_theta,
    save_hamiltonian,
)
from .pauli import PauliString, format_pauli, parse_pauli
from .search import (
    ExcitationSet,
    SearchConfig,
    SearchResult,
    adaptive_sci,
    enumerate_excitation_sets,
    full_sci,
    generalized_refine,
)
from .sim import (
    Circuit,
    NoiseModel,
    SimReport,
    build_prep_circuit,
    build_syndrome_circuit,
    run_trajectories,
)
from .tableau import (
    CliffordCircuit,
    StabilizerTableau,
    amplitudes,
    apply_clifford,
    basis_state,
    conjugate_pauli,
    expectation,
    project_excitation,
    sum_stabilizers,
    to_standard_form,
)

__version__ = "0.1.0"

__all__ = [
    "PauliString",
    "parse_pauli",
    "format_pauli",
    "StabilizerTableau",
    "CliffordCircuit",
    "basis_state",
    "apply_clifford",
    "conjugate_pauli",
    "expectation",
    "project_excitation",
    "sum_stabilizers",
    "to_standard_form",
    "amplitudes",
    "QubitHamiltonian",
    "MoleculeMeta",
    "GeneralizedState",
    "load_hamiltonian",
    "save_hamiltonian",
    "energy_stabilizer",
    "energy_generalized",
    "optimal_theta",
    "brute_force_ground",
    "hf_state_for",
    "SearchConfig",
    "SearchResult",
    "ExcitationSet",
    "enumerate_excitation_sets",
    "full_sci",
    "adaptive_sci",
    "generalized_refine",
    "StabilizerCode",
    "build_code",
    "build_code_detailed",
    "verify_distance",
    "codespace_contains",
    "Circuit",
    "NoiseModel",
    "SimReport",
    "build_prep_circuit",
    "build_syndrome_circuit",
    "run_trajectories",
    "__version__",
]
