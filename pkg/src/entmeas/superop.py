"""Superoperators on a fixed space and the canonical measurement maps.

A superoperator is stored as a dense matrix acting on column-vectorized
operators.  The constructors here build the maps this package is about:
the projective measurement, the coherence-weighted dephasing map, the
identity, the entangling measurement on an object+apparatus pair, and its
fully coherent (cloning) limit.  Complete positivity is decided through
the Choi matrix, trace preservation directly on a basis of inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    TOL_EIG,
    TOL_HERM,
    TOL_PSD,
    TOL_TRACE,
    DensityMatrix,
    as_matrix,
    basis_op,
    hermiticity_defect,
    unitarity_defect,
    unvec,
    vec,
)


@dataclass(frozen=True)
class EntanglementMatrix:
    """Hermitian unit-diagonal matrix weighting inter-branch coherences.

    An all-ones matrix means full coherence (the identity map limit), the
    identity matrix means a projective measurement.  Physically meaningful
    instances are positive semidefinite, but positivity is only enforced by
    the operations that require it (:func:`entmeas.linalg.gram_factor`, the
    object+apparatus+record extension), so that non-PSD candidates can
    still be fed to :func:`dephasing` for complete-positivity testing.
    """

    r: np.ndarray

    def __post_init__(self) -> None:
        m = as_matrix(self.r, name="entanglement matrix")
        if m.shape[0] != m.shape[1]:
            raise ValueError("entanglement matrix must be square")
        if hermiticity_defect(m) > TOL_HERM:
            raise ValueError("entanglement matrix is not Hermitian")
        if float(np.max(np.abs(np.diagonal(m) - 1.0))) > TOL_HERM:
            raise ValueError("entanglement matrix diagonal must be 1")
        m = m.copy()
        np.fill_diagonal(m, 1.0)
        m.setflags(write=False)
        object.__setattr__(self, "r", m)

    @property
    def d(self) -> int:
        return self.r.shape[0]

    def is_psd(self, tol: float = TOL_PSD) -> bool:
        return float(np.linalg.eigvalsh(self.r)[0]) >= -tol

    def conj(self) -> "EntanglementMatrix":
        """The entrywise conjugate (equivalently the transpose)."""
        return EntanglementMatrix(self.r.conj())

    @classmethod
    def from_coherence(cls, q: complex) -> "EntanglementMatrix":
        """The 2x2 matrix ``[[1, q], [q*, 1]]`` for a single coherence q."""
        q = complex(q)
        return cls(np.array([[1.0, q], [np.conj(q), 1.0]], dtype=complex))

    @classmethod
    def identity(cls, d: int) -> "EntanglementMatrix":
        return cls(np.eye(d, dtype=complex))

    @classmethod
    def all_ones(cls, d: int) -> "EntanglementMatrix":
        return cls(np.ones((d, d), dtype=complex))


@dataclass(frozen=True)
class KrausSet:
    """Operators ``F_k`` with the completeness property ``sum F_k^+ F_k = I``."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(as_matrix(f, name="Kraus operator") for f in self.operators)
        if not ops:
            raise ValueError("KrausSet needs at least one operator")
        shape = ops[0].shape
        if any(f.shape != shape for f in ops):
            raise ValueError("Kraus operators must share one shape")
        object.__setattr__(self, "operators", ops)
        defect = self.completeness_defect()
        if defect > TOL_EIG:
            raise ValueError(f"Kraus set is not complete (defect {defect:.3g})")

    @property
    def dim_in(self) -> int:
        return self.operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        total = sum(f.conj().T @ f for f in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim_in))))


@dataclass(frozen=True)
class Superoperator:
    """Linear map on operators, stored on column-vectorized operators.

    ``map_matrix`` has shape ``(dim_out**2, dim_in**2)``.  When the
    ``trace_preserving`` flag is set the property is verified on the full
    basis of matrix units at construction.
    """

    dim_in: int
    dim_out: int
    map_matrix: np.ndarray
    trace_preserving: bool = field(default=False)

    def __post_init__(self) -> None:
        m = as_matrix(self.map_matrix, name="superoperator matrix")
        expected = (self.dim_out**2, self.dim_in**2)
        if m.shape != expected:
            raise ValueError(f"map matrix shape {m.shape}, expected {expected}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "map_matrix", m)
        if self.trace_preserving and not is_trace_preserving(self, TOL_TRACE):
            raise ValueError("map flagged trace-preserving is not")

    def apply_matrix(self, op) -> np.ndarray:
        """Image of an arbitrary operator (no density-matrix validation)."""
        x = as_matrix(op)
        if x.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"operator dimension {x.shape[0]} != {self.dim_in}")
        return unvec(self.map_matrix @ vec(x), self.dim_out)

    def image(self, k: int, l: int) -> np.ndarray:
        """Image of the matrix unit ``|k><l|``."""
        return self.apply_matrix(basis_op(self.dim_in, k, l))


def apply(s: Superoperator, rho: DensityMatrix, out_dims=None) -> DensityMatrix:
    """Apply ``s`` to a density matrix and validate the output.

    The result is checked against all density-matrix invariants rather than
    silently symmetrized; a failure signals a non-physical map.
    """
    if rho.dim != s.dim_in:
        raise ValueError(f"state dimension {rho.dim} != map input dimension {s.dim_in}")
    out = s.apply_matrix(rho.matrix)
    return DensityMatrix(out, out_dims)


def identity_superop(d: int) -> Superoperator:
    return Superoperator(d, d, np.eye(d * d, dtype=complex), trace_preserving=True)


def dephasing(r: EntanglementMatrix) -> Superoperator:
    """Multiply each matrix element by the matching coherence weight.

    Trace preserving for any unit-diagonal ``r``; completely positive
    exactly when ``r`` is positive semidefinite.
    """
    return Superoperator(r.d, r.d, np.diag(vec(r.r)), trace_preserving=True)


def projective(d: int) -> Superoperator:
    """Kill all off-diagonal elements in the computational basis."""
    return dephasing(EntanglementMatrix.identity(d))


def psm_projectors(d: int) -> KrausSet:
    """The orthogonal projectors ``|k><k|`` of the projective measurement."""
    return KrausSet(tuple(basis_op(d, k, k) for k in range(d)))


def outcome_probabilities(kraus: KrausSet, rho: DensityMatrix) -> np.ndarray:
    """Readout distribution ``P(k) = Tr(F_k^+ F_k rho)``."""
    if rho.dim != kraus.dim_in:
        raise ValueError("state dimension does not match the Kraus operators")
    probs = [np.trace(f.conj().T @ f @ rho.matrix).real for f in kraus.operators]
    return np.asarray(probs)


def superop_from_kraus(kraus: KrausSet) -> Superoperator:
    """Assemble ``sum_k F_k (.) F_k^+`` as a map matrix."""
    total = sum(np.kron(f.conj(), f) for f in kraus.operators)
    return Superoperator(kraus.dim_in, kraus.dim_out, total, trace_preserving=True)


def unitary_superop(u) -> Superoperator:
    """Conjugation by a unitary, ``rho -> U rho U^+``."""
    m = as_matrix(getattr(u, "matrix", u))
    if m.shape[0] != m.shape[1] or unitarity_defect(m) > TOL_EIG:
        raise ValueError("unitary_superop expects a unitary matrix")
    return Superoperator(m.shape[0], m.shape[0], np.kron(m.conj(), m), trace_preserving=True)


def compose(outer: Superoperator, inner: Superoperator) -> Superoperator:
    """The map ``outer after inner``."""
    if inner.dim_out != outer.dim_in:
        raise ValueError("map dimensions do not compose")
    return Superoperator(
        inner.dim_in,
        outer.dim_out,
        outer.map_matrix @ inner.map_matrix,
        trace_preserving=outer.trace_preserving and inner.trace_preserving,
    )


def entangling_measurement(r: EntanglementMatrix) -> Superoperator:
    """Ideal entangling measurement on the object+apparatus pair.

    Acts on operators of the d*d-dimensional joint space.  The output is
    supported on the cloned basis states ``|ii>``, weighted pairwise by the
    coherence matrix, and is independent of the apparatus part of the
    input: ``sigma -> sum_ij r_ij (Tr_B sigma)_ij |ii><jj|``.
    """
    d = r.d
    dd = d * d
    m = np.zeros((dd * dd, dd * dd), dtype=complex)
    for i in range(d):
        for j in range(d):
            out_index = (j * d + j) * dd + (i * d + i)
            weight = r.r[i, j]
            for k in range(d):
                m[out_index, (j * d + k) * dd + (i * d + k)] += weight
    return Superoperator(dd, dd, m, trace_preserving=True)


def cloning_superop(d: int) -> Superoperator:
    """Fully coherent limit: basis states are cloned onto the apparatus."""
    return entangling_measurement(EntanglementMatrix.all_ones(d))


def choi(s: Superoperator) -> np.ndarray:
    """Choi matrix on output (x) input, from the basis-unit images."""
    d = s.dim_in
    c = np.zeros((s.dim_out * d, s.dim_out * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            c += np.kron(s.image(k, l), basis_op(d, k, l))
    return c


def is_completely_positive(s: Superoperator, tol: float = TOL_PSD) -> bool:
    """CP test: the Choi matrix must be positive semidefinite."""
    c = choi(s)
    if hermiticity_defect(c) > TOL_HERM:
        return False
    return float(np.linalg.eigvalsh(c)[0]) >= -tol


def is_trace_preserving(s: Superoperator, tol: float = TOL_TRACE) -> bool:
    """TP test on the full basis: ``Tr E(|k><l|) = delta_kl``."""
    for k in range(s.dim_in):
        for l in range(s.dim_in):
            expected = 1.0 if k == l else 0.0
            if abs(complex(np.trace(s.image(k, l))) - expected) > tol:
                return False
    return True
