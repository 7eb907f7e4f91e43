"""Entangling quantum-measurement superoperators and their unitary realization.

The package builds the measurement maps that interpolate between a fully
coherent (cloning) interaction and a projective measurement, extends them
from the object space to object+apparatus(+record) spaces, realizes them
as an explicit three-qubit gate, and computes the coherent information the
measurement preserves.  All types are immutable values and all operations
are pure functions, so concurrent read-only use is safe.
"""

from .linalg import (
    TOL_EIG,
    TOL_HERM,
    TOL_PSD,
    TOL_TRACE,
    DensityMatrix,
    StateVector,
    basis_ket,
    basis_op,
    gram_factor,
    hermitian_eig,
    is_psd,
    kron,
    maximally_mixed,
    partial_trace,
    partial_trace_matrix,
    unvec,
    vec,
)
from .superop import (
    EntanglementMatrix,
    KrausSet,
    Superoperator,
    apply,
    choi,
    cloning_superop,
    compose,
    dephasing,
    entangling_measurement,
    identity_superop,
    is_completely_positive,
    is_trace_preserving,
    outcome_probabilities,
    projective,
    psm_projectors,
    superop_from_kraus,
    unitary_superop,
)
from .extops import (
    ExtendedSuperoperator,
    PsiRepresentation,
    apply_ext,
    extend,
    extended_entangling,
    extended_entangling_abd,
    from_rect_matrix,
    is_completely_positive_ext,
    psi_from_unitary,
    rect_matrix,
    restrict,
)
from .dilation import (
    CloningAssignment,
    DilationReport,
    UnitaryGate,
    cloning_unitary,
    combined_unitary,
    complete_unitary_from_first_column,
    default_assignment,
    entangling_unitary,
    initial_apparatus_state,
    realize_extended,
    verify_dilation,
)
from .infomeasures import (
    InfoReport,
    coherent_information_general,
    coherent_information_measurement,
    microstate_density,
    reduced_density,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "TOL_EIG",
    "TOL_HERM",
    "TOL_PSD",
    "TOL_TRACE",
    "DensityMatrix",
    "StateVector",
    "basis_ket",
    "basis_op",
    "gram_factor",
    "hermitian_eig",
    "is_psd",
    "kron",
    "maximally_mixed",
    "partial_trace",
    "partial_trace_matrix",
    "unvec",
    "vec",
    "EntanglementMatrix",
    "KrausSet",
    "Superoperator",
    "apply",
    "choi",
    "cloning_superop",
    "compose",
    "dephasing",
    "entangling_measurement",
    "identity_superop",
    "is_completely_positive",
    "is_trace_preserving",
    "outcome_probabilities",
    "projective",
    "psm_projectors",
    "superop_from_kraus",
    "unitary_superop",
    "ExtendedSuperoperator",
    "PsiRepresentation",
    "apply_ext",
    "extend",
    "extended_entangling",
    "extended_entangling_abd",
    "from_rect_matrix",
    "is_completely_positive_ext",
    "psi_from_unitary",
    "rect_matrix",
    "restrict",
    "CloningAssignment",
    "DilationReport",
    "UnitaryGate",
    "cloning_unitary",
    "combined_unitary",
    "complete_unitary_from_first_column",
    "default_assignment",
    "entangling_unitary",
    "initial_apparatus_state",
    "realize_extended",
    "verify_dilation",
    "InfoReport",
    "coherent_information_general",
    "coherent_information_measurement",
    "microstate_density",
    "reduced_density",
    "von_neumann_entropy",
]
