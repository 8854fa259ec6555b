"""Spin-block tools for registers of identical mixed qubits.

The package decomposes N-fold tensor powers of a mixed qubit state into
total-spin blocks, simulates the purification protocol built on that
measurement, derives optimal cloning / state-estimation fidelities, and
brute-force verifies every closed form on explicit matrices for small N.
"""

from .analytics import (
    BlockSpectrum,
    SpectrumRow,
    block_fidelity,
    block_probability,
    block_spectrum,
    block_state_matrix,
    mean_fidelity,
    mean_fidelity_asymptote,
    multiplicity,
    yield_asymptote,
    yield_factor,
)
from .blocks import (
    SINGLET,
    BasisConstructionError,
    BlockProjector,
    BlockSwap,
    SchurBasis,
    block_projector,
    block_swap,
    build_schur_basis,
    collective_lowering,
    dicke_state,
    export_basis_csv,
    seed_vector,
)
from .cloning import (
    INFINITE_CLONES,
    CloneSettings,
    CovariantMapParams,
    ScanResult,
    covariant_output_fidelity,
    estimation_lambda,
    mixed_cloning_fidelity,
    optimality_scan,
    pure_cloning_fidelity,
    scaling_relation_check,
)
from .core import (
    BlockLabel,
    MixedQubit,
    SizeLimitError,
    dense_cap,
    density_matrix,
    haar_unitary,
    is_hermitian,
    is_unitary,
    kron_power,
    max_abs,
    outer,
    partial_trace,
    qubit_eigenstates,
    random_direction,
    state_fidelity,
)
from .oracle import (
    DecompositionReport,
    SymmetrizationReport,
    VerificationError,
    covariance_residual,
    measure_block,
    pure_component_moments,
    purification_map_outputs,
    quadrature_check,
    reversibility_check,
    symmetrize_and_compare,
    verify_decomposition,
)
from .protocol import (
    OutcomeRecord,
    SimulationSummary,
    run_protocol,
    run_protocol_dense,
    write_outcomes_csv,
)

__version__ = "0.1.0"
