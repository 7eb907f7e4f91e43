"""Dense complex linear algebra for small multipartite quantum systems.

All operators are plain numpy arrays with ``dtype=complex``; the wrapper
types below add subsystem bookkeeping and validation on top.  Operators are
vectorized column-by-column (Fortran order) throughout the package, so a
matrix acting on vectorized operators is always consistent with
:func:`vec` / :func:`unvec`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Default tolerances.  Dimensions stay below ~64, so double precision leaves
# a lot of headroom around these.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
TOL_EIG = 1e-9

# Kronecker product of dense matrices; numpy's implementation is the
# canonical one and is re-exported so all tensor products go through here.
kron = np.kron


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def vec(op) -> np.ndarray:
    """Stack the columns of an operator into a single vector."""
    return np.asarray(op, dtype=complex).reshape(-1, order="F")


def unvec(v, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for a ``rows x cols`` operator."""
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=complex).reshape((rows, cols), order="F")


def hermiticity_defect(h) -> float:
    m = np.asarray(h, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(h, tol: float = TOL_HERM) -> bool:
    m = as_matrix(h)
    return m.shape[0] == m.shape[1] and hermiticity_defect(m) <= tol


def unitarity_defect(u) -> float:
    m = as_matrix(u)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))


def basis_ket(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


def basis_op(dim: int, k: int, l: int) -> np.ndarray:
    """The matrix unit ``|k><l|``."""
    m = np.zeros((dim, dim), dtype=complex)
    m[k, l] = 1.0
    return m


def maximally_mixed(dim: int, dims: Sequence[int] | None = None) -> "DensityMatrix":
    return DensityMatrix(np.eye(dim, dtype=complex) / dim, dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace operator.

    ``dims`` lists the subsystem dimensions (their product is the matrix
    dimension); it defaults to a single subsystem.  Validation happens at
    construction and the stored array is read-only afterwards.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        m = as_matrix(self.matrix, name="density matrix")
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        dims = (m.shape[0],) if self.dims is None else tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"subsystem dims {dims} do not match dimension {m.shape[0]}")
        if hermiticity_defect(m) > TOL_HERM:
            raise ValueError("density matrix is not Hermitian")
        if float(np.linalg.eigvalsh(m)[0]) < -TOL_PSD:
            raise ValueError("density matrix has a negative eigenvalue")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"density matrix trace {tr} is not 1")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_dims(self, dims: Sequence[int]) -> "DensityMatrix":
        """Same operator with a different subsystem split."""
        return DensityMatrix(self.matrix, tuple(dims))

    @classmethod
    def from_ket(cls, amplitudes, dims: Sequence[int] | None = None) -> "DensityMatrix":
        k = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(np.outer(k, k.conj()), dims)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure-state vector with subsystem bookkeeping."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("state vector contains non-finite entries")
        dims = (a.size,) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != a.size:
            raise ValueError(f"subsystem dims {dims} do not match dimension {a.size}")
        if abs(np.linalg.norm(a) - 1.0) > TOL_TRACE:
            raise ValueError("state vector is not normalized")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_ket(self.amplitudes, self.dims)


def partial_trace_matrix(op, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of an arbitrary (not necessarily Hermitian) operator.

    ``dims`` lists the subsystem dimensions of the square operator ``op``;
    ``keep`` names the subsystems retained, in their original order.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep_sorted = sorted({int(k) for k in keep})
    if not keep_sorted:
        raise ValueError("keep must name at least one subsystem")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValueError(f"subsystem index out of range for {n} subsystems")
    m = as_matrix(op)
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValueError(f"operator shape {m.shape} does not match dims {dims}")
    a = m.reshape(dims + dims)
    cur = list(dims)
    for i in sorted(set(range(n)) - set(keep_sorted), reverse=True):
        a = np.trace(a, axis1=i, axis2=i + len(cur))
        del cur[i]
    d = int(np.prod(cur))
    return a.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the kept subsystems."""
    keep_sorted = sorted({int(k) for k in keep})
    reduced = partial_trace_matrix(rho.matrix, rho.dims, keep_sorted)
    return DensityMatrix(reduced, tuple(rho.dims[k] for k in keep_sorted))


def hermitian_eig(h, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.  Each eigenvector's phase is fixed by making
    its largest-magnitude component real and positive.
    """
    m = as_matrix(h)
    if m.shape[0] != m.shape[1] or hermiticity_defect(m) > tol:
        raise ValueError("hermitian_eig expects a Hermitian matrix")
    evals, evecs = np.linalg.eigh(m)
    evals = evals[::-1].copy()
    evecs = evecs[:, ::-1].copy()
    for j in range(evecs.shape[1]):
        col = evecs[:, j]
        pivot = col[int(np.argmax(np.abs(col)))]
        if abs(pivot) > 0:
            evecs[:, j] = col * (pivot.conj() / abs(pivot))
    return evals, evecs


def is_psd(h, tol: float = TOL_PSD) -> bool:
    """Whether a Hermitian matrix has no eigenvalue below ``-tol``."""
    m = as_matrix(h)
    if m.shape[0] != m.shape[1] or hermiticity_defect(m) > TOL_HERM:
        raise ValueError("is_psd expects a Hermitian matrix")
    return float(np.linalg.eigvalsh(m)[0]) >= -tol


def gram_factor(r, tol: float = TOL_PSD) -> list[np.ndarray]:
    """Unit vectors ``v_i`` whose Gram matrix is ``r``: ``<v_i|v_j> = r_ij``.

    ``r`` must be Hermitian, positive semidefinite within ``tol`` and have
    unit diagonal.  The vectors are the columns of the canonical triangular
    factor of ``r`` (the adjoint of its Cholesky factor), computed through
    an eigendecomposition square root followed by a QR triangularization so
    that rank-deficient inputs work too.  The leading vector is always
    ``(1, 0, ..., 0)`` and the factor's rows are phase-fixed to make their
    first significant entry real and nonnegative, which pins the remaining
    unitary freedom and makes the output deterministic.
    """
    m = as_matrix(getattr(r, "r", r), name="gram matrix")
    if m.shape[0] != m.shape[1]:
        raise ValueError("gram_factor expects a square matrix")
    if hermiticity_defect(m) > TOL_HERM:
        raise ValueError("gram_factor expects a Hermitian matrix")
    if float(np.max(np.abs(np.diagonal(m) - 1.0))) > TOL_HERM:
        raise ValueError("gram_factor expects unit diagonal entries")
    d = m.shape[0]
    evals, evecs = np.linalg.eigh(m)
    if float(evals[0]) < -tol:
        raise ValueError("matrix is not positive semidefinite")
    root = np.sqrt(np.clip(evals, 0.0, None))
    factor = root[:, None] * evecs.conj().T
    _, tri = np.linalg.qr(factor)
    tri = np.asarray(tri, dtype=complex)
    for z in range(d):
        row = tri[z]
        significant = np.flatnonzero(np.abs(row) > 1e-12)
        if significant.size:
            pivot = row[significant[0]]
            tri[z] = row * (pivot.conj() / abs(pivot))
    return [tri[:, i].copy() for i in range(d)]
