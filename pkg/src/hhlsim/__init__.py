"""State-vector HHL solver and benchmark harness."""

from .errors import HhlSimError
from .families import FamilySpec, family_census, generate
from .hamiltonian import (
    BlockEncoding,
    BlockEvolution,
    EvolutionBackend,
    ExactEvolution,
    PauliTermList,
    TrotterEvolution,
    TrotterPlan,
    block_encode,
    controlled_evolution,
    make_backend,
    make_trotter_plan,
    pauli_decompose,
    taylor_exponential,
    trotter_unitary,
)
from .linalg import (
    ProblemInstance,
    Spectrum,
    condition_number,
    hermitian_eigendecomposition,
    solve_linear,
    unitary_exponential,
)
from .pipeline import (
    HhlConfig,
    HhlResult,
    eigenvalue_inversion,
    expected_outcome_distribution,
    prepare_b,
    resolve_config,
    run_hhl,
)
from .qpe import (
    PhaseEstimate,
    inverse_phase_estimation,
    phase_estimation,
    qft,
    read_clock,
)
from .statevector import (
    RegisterLayout,
    ShotHistogram,
    StateVector,
    apply_unitary,
    fidelity,
    init_state,
    measure_qubit,
    sample_counts,
)
from .sweep import (
    FamilyTemplate,
    MethodConfig,
    SweepConfig,
    run_eq3_experiment,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "HhlSimError",
    "FamilySpec",
    "family_census",
    "generate",
    "BlockEncoding",
    "BlockEvolution",
    "EvolutionBackend",
    "ExactEvolution",
    "PauliTermList",
    "TrotterEvolution",
    "TrotterPlan",
    "block_encode",
    "controlled_evolution",
    "make_backend",
    "make_trotter_plan",
    "pauli_decompose",
    "taylor_exponential",
    "trotter_unitary",
    "ProblemInstance",
    "Spectrum",
    "condition_number",
    "hermitian_eigendecomposition",
    "solve_linear",
    "unitary_exponential",
    "HhlConfig",
    "HhlResult",
    "eigenvalue_inversion",
    "expected_outcome_distribution",
    "prepare_b",
    "resolve_config",
    "run_hhl",
    "PhaseEstimate",
    "inverse_phase_estimation",
    "phase_estimation",
    "qft",
    "read_clock",
    "RegisterLayout",
    "ShotHistogram",
    "StateVector",
    "apply_unitary",
    "fidelity",
    "init_state",
    "measure_qubit",
    "sample_counts",
    "FamilyTemplate",
    "MethodConfig",
    "SweepConfig",
    "run_eq3_experiment",
    "run_sweep",
]
