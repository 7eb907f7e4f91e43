"""Unitary realizations of the entangling measurement.

Three gates are built here: the cloning permutation on object+apparatus,
the partial entangler that writes a record microstate conditioned on the
apparatus value, and their three-system combination.  Feeding the combined
gate the fixed apparatus+record input reproduces the abstract extended
measurement, which :func:`verify_dilation` checks numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg import (
    TOL_EIG,
    StateVector,
    as_matrix,
    basis_ket,
    gram_factor,
    partial_trace_matrix,
    unitarity_defect,
)
from .extops import (
    ExtendedSuperoperator,
    extended_entangling,
    extended_entangling_abd,
    psi_from_unitary,
    restrict,
)
from .superop import EntanglementMatrix, projective


@dataclass(frozen=True)
class UnitaryGate:
    """Unitary on a product of subsystems (object slowest index)."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        m = as_matrix(self.matrix, name="gate matrix")
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise ValueError(f"gate shape {m.shape} does not match dims {dims}")
        defect = unitarity_defect(m)
        if defect > TOL_EIG:
            raise ValueError(f"gate is not unitary (defect {defect:.3g})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CloningAssignment:
    """Where the cloning permutation sends the non-reset basis pairs.

    The pairs ``(i, 0)`` are always sent to ``(i, i)``; ``targets`` fixes
    the destination of every pair ``(i, j)`` with ``j != 0`` and must make
    the whole map a bijection with distinct output labels (``k != l``) on
    every assigned pair.  Indices are zero-based.
    """

    d: int
    targets: Mapping[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 1:
            raise ValueError("dimension must be positive")
        targets = {
            (int(i), int(j)): (int(k), int(l)) for (i, j), (k, l) in self.targets.items()
        }
        expected_keys = {(i, j) for i in range(d) for j in range(1, d)}
        if set(targets) != expected_keys:
            raise ValueError("assignment must cover exactly the pairs (i, j != 0)")
        full = {(i, 0): (i, i) for i in range(d)}
        for key, (k, l) in targets.items():
            if not (0 <= k < d and 0 <= l < d):
                raise ValueError(f"assigned target {k, l} out of range")
            if k == l:
                raise ValueError(f"assigned pair {key} maps to equal labels {k, l}")
            full[key] = (k, l)
        if len(set(full.values())) != d * d:
            raise ValueError("assignment is not a bijection on basis pairs")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "targets", targets)

    def output(self, i: int, j: int) -> tuple[int, int]:
        return (i, i) if j == 0 else self.targets[(i, j)]


def default_assignment(d: int) -> CloningAssignment:
    """Cyclic assignment ``(i, j) -> (i, (i + j) mod d)``.

    Keeps the object label and permutes the apparatus label cyclically, so
    ``j = 0`` lands on the cloned pair ``(i, i)`` and every other pair gets
    distinct labels.
    """
    targets = {(i, j): (i, (i + j) % d) for i in range(d) for j in range(1, d)}
    return CloningAssignment(d, targets)


def cloning_unitary(assignment: CloningAssignment) -> UnitaryGate:
    """Permutation gate on object+apparatus sending ``|i>|0> -> |i>|i>``."""
    d = assignment.d
    m = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            k, l = assignment.output(i, j)
            m[k * d + l, i * d + j] = 1.0
    return UnitaryGate((d, d), m)


def complete_unitary_from_first_column(
    first_column, completion_order: Sequence[int] | None = None
) -> np.ndarray:
    """Deterministic unitary whose first column is the given unit vector.

    For two dimensions the standard closed-form completion
    ``[[a, -b*], [b, a*]]`` is used.  Otherwise the remaining columns come
    from modified Gram-Schmidt over the computational basis vectors, taken
    in index order (or in ``completion_order``), skipping candidates within
    tolerance of the span already built.
    """
    mu = np.asarray(first_column, dtype=complex).reshape(-1)
    dim = mu.size
    if abs(np.linalg.norm(mu) - 1.0) > TOL_EIG:
        raise ValueError("first column must be a unit vector")
    if dim == 2 and completion_order is None:
        return np.array([[mu[0], -np.conj(mu[1])], [mu[1], np.conj(mu[0])]])
    order = range(dim) if completion_order is None else [int(i) for i in completion_order]
    cols = [mu]
    for index in order:
        if len(cols) == dim:
            break
        candidate = basis_ket(dim, index)
        # two orthogonalization passes: a tiny first residual would otherwise
        # amplify rounding error past the golden-matrix tolerances
        for _ in range(2):
            for c in cols:
                candidate = candidate - c * np.vdot(c, candidate)
        norm = float(np.linalg.norm(candidate))
        if norm > TOL_EIG:
            cols.append(candidate / norm)
    if len(cols) < dim:
        raise ValueError("could not complete the unitary from the basis candidates")
    return np.column_stack(cols)


def entangling_unitary(
    microstates: Sequence, completion_order: Sequence[int] | None = None
) -> UnitaryGate:
    """Partial entangler on apparatus+record: ``|i>|0> -> |i>|m_i>``.

    One record rotation per apparatus value, block-diagonal over the
    apparatus basis; block ``i`` carries microstate ``m_i`` in its first
    column and a deterministic completion elsewhere.
    """
    mus = [
        np.asarray(m.amplitudes if isinstance(m, StateVector) else m, dtype=complex).reshape(-1)
        for m in microstates
    ]
    if not mus:
        raise ValueError("at least one microstate is required")
    d_d = mus[0].size
    if any(m.size != d_d for m in mus):
        raise ValueError("microstates must share one dimension")
    for m in mus:
        if abs(np.linalg.norm(m) - 1.0) > TOL_EIG:
            raise ValueError("microstates must be unit vectors")
    d_b = len(mus)
    u = np.zeros((d_b * d_d, d_b * d_d), dtype=complex)
    for i, mu in enumerate(mus):
        block = complete_unitary_from_first_column(mu, completion_order)
        u[i * d_d : (i + 1) * d_d, i * d_d : (i + 1) * d_d] = block
    return UnitaryGate((d_b, d_d), u)


def combined_unitary(
    r: EntanglementMatrix,
    assignment: CloningAssignment | None = None,
    completion_order: Sequence[int] | None = None,
) -> UnitaryGate:
    """Three-system gate: clone, then write the record microstate on the
    cloned branches.

    The record rotation for value ``i`` fires only where the apparatus
    label equals the object label after cloning, which keeps all rows with
    a non-matching apparatus untouched.  The active inputs ``|k>|0>|g>``
    are mapped to ``|k>|k>|m_k>`` with ``m_k`` the Gram-factor microstates
    of ``r``.
    """
    d = r.d
    assignment = default_assignment(d) if assignment is None else assignment
    if assignment.d != d:
        raise ValueError("assignment dimension does not match the coherence matrix")
    microstates = gram_factor(r.r)
    base = np.kron(cloning_unitary(assignment).matrix, np.eye(d, dtype=complex))
    rotate = np.zeros((d**3, d**3), dtype=complex)
    matched = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        pair = np.zeros((d * d, d * d), dtype=complex)
        pair[i * d + i, i * d + i] = 1.0
        matched += pair
        rotate += np.kron(pair, complete_unitary_from_first_column(microstates[i], completion_order))
    rotate += np.kron(np.eye(d * d, dtype=complex) - matched, np.eye(d, dtype=complex))
    return UnitaryGate((d, d, d), rotate @ base)


def initial_apparatus_state(d_b: int, d_d: int) -> StateVector:
    """Ground state of apparatus and record, ``|0> (x) |g>``."""
    return StateVector(np.kron(basis_ket(d_b, 0), basis_ket(d_d, 0)), (d_b, d_d))


def realize_extended(u: UnitaryGate, fixed_state: StateVector) -> ExtendedSuperoperator:
    """Extension realized by a unitary with a pure fixed input:
    images are ``U(|k><l| (x) |phi><phi|)U^+``."""
    if u.dim % fixed_state.dim != 0:
        raise ValueError("fixed state dimension does not divide the gate dimension")
    return psi_from_unitary(u.matrix, fixed_state).to_extended()


@dataclass(frozen=True)
class DilationCheck:
    passed: bool
    max_dev: float


@dataclass(frozen=True)
class DilationReport:
    """Named pass/fail outcomes with the worst deviation per check."""

    checks: dict[str, DilationCheck]
    tol: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def max_dev(self) -> float:
        return max(c.max_dev for c in self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            name: {"pass": bool(c.passed), "max_dev": float(c.max_dev)}
            for name, c in self.checks.items()
        }


def verify_dilation(
    r: EntanglementMatrix,
    assignment: CloningAssignment | None = None,
    tol: float = 1e-10,
) -> DilationReport:
    """Check that the combined gate realizes the abstract measurement.

    Verifies unitarity of all three gates, the active columns
    ``|k>|0>|g> -> |k>|k>|m_k>``, equality of the realized images with the
    object+apparatus+record extension, the record-trace reduction to the
    pairwise-coherence images, and the object restriction to the projective
    map.  The gate's record states carry the coherence weights of the
    conjugate of ``r`` (the fixed microstate phase convention), so the
    comparison references are built from ``r.conj()``; for real-valued
    ``r`` this coincides with ``r`` itself.  Failures are reported, not
    raised.
    """
    d = r.d
    assignment = default_assignment(d) if assignment is None else assignment
    microstates = gram_factor(r.r)
    uc = cloning_unitary(assignment)
    ue = entangling_unitary(microstates)
    ucd = combined_unitary(r, assignment)
    ground = initial_apparatus_state(d, d)
    realized = realize_extended(ucd, ground)

    checks: dict[str, DilationCheck] = {}

    def record(name: str, dev: float) -> None:
        checks[name] = DilationCheck(passed=bool(dev < tol), max_dev=float(dev))

    record("cloning_unitary", unitarity_defect(uc.matrix))
    record("entangling_unitary", unitarity_defect(ue.matrix))
    record("combined_unitary", unitarity_defect(ucd.matrix))

    dev = 0.0
    for k in range(d):
        column = ucd.matrix @ np.kron(basis_ket(d, k), ground.amplitudes)
        target = np.kron(np.kron(basis_ket(d, k), basis_ket(d, k)), microstates[k])
        dev = max(dev, float(np.max(np.abs(column - target))))
    record("active_columns", dev)

    reference = extended_entangling_abd(r.conj())
    record("images_vs_abd", float(np.max(np.abs(realized.images - reference.images))))

    pair = extended_entangling(r.conj())
    dev = 0.0
    for k in range(d):
        for l in range(d):
            traced = partial_trace_matrix(realized.images[k, l], realized.dims_out, [0, 1])
            dev = max(dev, float(np.max(np.abs(traced - pair.images[k, l]))))
    record("d_trace_vs_entangling", dev)

    record(
        "bd_trace_vs_projective",
        float(np.max(np.abs(restrict(realized).map_matrix - projective(d).map_matrix))),
    )
    return DilationReport(checks=checks, tol=float(tol))
