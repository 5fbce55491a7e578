"""Weak-measurement enhanced state transfer on dissipative binary-tree spin networks."""

from treeqst.tree import (
    ColumnBasis,
    EffectiveChain,
    SingleExcitationHamiltonian,
    TreeSpec,
    build_column_basis,
    build_tree_hamiltonian,
    generation_of,
    reduce_to_chain,
    verify_invariant_subspace,
)
from treeqst.dynamics import (
    AmplitudeTrajectory,
    BathSpec,
    amplitudes_analytic,
    amplitudes_fulltree_oracle,
    amplitudes_pseudomode_oracle,
    chain_mode_amplitude_analytic,
    memory_kernel,
    sine_transform_matrix,
)
from treeqst.protocol import (
    ProtocolAborted,
    ProtocolParams,
    QubitState,
    TransferOutcome,
    average_fidelity_closed,
    average_fidelity_natural,
    average_fidelity_numeric,
    average_success_probability,
    optimal_qmr_strength,
    transfer,
    weak_measurement,
)
from treeqst.entanglement import (
    TwoQubitState,
    concurrence,
    distribute,
    optimal_ed,
    wootters_concurrence,
)

__version__ = "0.1.0"
