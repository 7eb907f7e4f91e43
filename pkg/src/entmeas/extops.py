"""Extended superoperators: maps from object operators to a larger space.

An extended superoperator is stored as the set of basis-unit images
``E_kl = E(|k><l|)``, which is the computationally cheap representation:
applying it to a state is just a weighted sum of those images.  The module
also provides the rectangular matrix view, the restriction back to an
ordinary map on the object, a Choi-style complete-positivity witness, and
the row-vector representation that exists for unitary realizations with a
pure apparatus input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    TOL_EIG,
    TOL_TRACE,
    DensityMatrix,
    StateVector,
    as_matrix,
    basis_ket,
    basis_op,
    gram_factor,
    hermiticity_defect,
    partial_trace_matrix,
    unitarity_defect,
    vec,
)
from .superop import EntanglementMatrix, Superoperator


@dataclass(frozen=True)
class ExtendedSuperoperator:
    """Map from operators on the object space to a larger product space.

    ``images[k, l]`` is the image of the matrix unit ``|k><l|`` and lives on
    the space with subsystem dimensions ``dims_out`` (object first).  The
    image set must satisfy the Hermiticity pairing ``images[l, k] ==
    images[k, l]^+``; maps flagged trace-preserving must also satisfy
    ``sum_k Tr images[k, k] == d_a``.
    """

    d_a: int
    dims_out: tuple[int, ...]
    images: np.ndarray
    trace_preserving: bool = field(default=False)

    def __post_init__(self) -> None:
        dims_out = tuple(int(d) for d in self.dims_out)
        d_out = int(np.prod(dims_out))
        arr = np.asarray(self.images, dtype=complex)
        expected = (self.d_a, self.d_a, d_out, d_out)
        if arr.shape != expected:
            raise ValueError(f"images shape {arr.shape}, expected {expected}")
        pairing = max(
            float(np.max(np.abs(arr[l, k] - arr[k, l].conj().T)))
            for k in range(self.d_a)
            for l in range(k, self.d_a)
        )
        if pairing > TOL_EIG:
            raise ValueError(f"image set violates Hermiticity pairing (defect {pairing:.3g})")
        if self.trace_preserving:
            total = sum(complex(np.trace(arr[k, k])) for k in range(self.d_a))
            if abs(total - self.d_a) > TOL_TRACE * self.d_a:
                raise ValueError("image set flagged trace-preserving is not")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "images", arr)
        object.__setattr__(self, "dims_out", dims_out)

    @property
    def dim_out(self) -> int:
        return int(np.prod(self.dims_out))

    def image(self, k: int, l: int) -> np.ndarray:
        return self.images[k, l]


@dataclass(frozen=True)
class PsiRepresentation:
    """Row vectors ``psi_k`` with ``E_kl = psi_k psi_l^+``.

    Exists for unitary realizations applied to a pure fixed input; the rows
    are orthonormal vectors in the output space.
    """

    psi: np.ndarray
    dims_out: tuple[int, ...]

    def __post_init__(self) -> None:
        m = as_matrix(self.psi, name="psi matrix")
        dims_out = tuple(int(d) for d in self.dims_out)
        if m.shape[1] != int(np.prod(dims_out)):
            raise ValueError("psi row length does not match output dims")
        gram = m.conj() @ m.T
        if float(np.max(np.abs(gram - np.eye(m.shape[0])))) > TOL_EIG:
            raise ValueError("psi rows are not orthonormal")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "psi", m)
        object.__setattr__(self, "dims_out", dims_out)

    @property
    def d_a(self) -> int:
        return self.psi.shape[0]

    def to_extended(self) -> ExtendedSuperoperator:
        d_a, d_out = self.psi.shape
        images = np.empty((d_a, d_a, d_out, d_out), dtype=complex)
        for k in range(d_a):
            for l in range(d_a):
                images[k, l] = np.outer(self.psi[k], self.psi[l].conj())
        return ExtendedSuperoperator(d_a, self.dims_out, images, trace_preserving=True)


def extend(s: Superoperator, rho_b0: DensityMatrix) -> ExtendedSuperoperator:
    """Fix the apparatus input of a joint-space map: images are
    ``E_kl = S(|k><l| (x) rho_b0)``."""
    d_b = rho_b0.dim
    if s.dim_in % d_b != 0:
        raise ValueError(f"map input dimension {s.dim_in} is not divisible by {d_b}")
    d_a = s.dim_in // d_b
    if s.dim_out != s.dim_in:
        raise ValueError("extend expects a map on the joint space (square dimensions)")
    images = np.empty((d_a, d_a, s.dim_out, s.dim_out), dtype=complex)
    for k in range(d_a):
        for l in range(d_a):
            images[k, l] = s.apply_matrix(np.kron(basis_op(d_a, k, l), rho_b0.matrix))
    dims_out = (d_a,) + rho_b0.dims
    return ExtendedSuperoperator(d_a, dims_out, images, trace_preserving=s.trace_preserving)


def extended_entangling(r: EntanglementMatrix) -> ExtendedSuperoperator:
    """Extension of the entangling measurement: ``E_kl = r_kl |kk><ll|``."""
    d = r.d
    images = np.zeros((d, d, d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            images[k, l, k * d + k, l * d + l] = r.r[k, l]
    return ExtendedSuperoperator(d, (d, d), images, trace_preserving=True)


def _microstate_images(microstates: list[np.ndarray]) -> np.ndarray:
    """Images ``|k k m_k><l l m_l|`` for given record microstates."""
    d = len(microstates)
    d_d = microstates[0].size
    kets = [np.kron(np.kron(basis_ket(d, k), basis_ket(d, k)), microstates[k]) for k in range(d)]
    dim = d * d * d_d
    images = np.empty((d, d, dim, dim), dtype=complex)
    for k in range(d):
        for l in range(d):
            images[k, l] = np.outer(kets[k], kets[l].conj())
    return images


def extended_entangling_abd(r: EntanglementMatrix) -> ExtendedSuperoperator:
    """Object+apparatus+record extension whose record average reproduces
    :func:`extended_entangling` exactly.

    The record states are the conjugates of the Gram-factor vectors of
    ``r``; with that orientation the record trace of ``E_kl`` contracts to
    exactly ``r_kl |kk><ll|`` (the bra state sits on the ``l`` index, so an
    unconjugated family would produce the transposed coherence weights for
    complex ``r``).  Requires ``r`` positive semidefinite.
    """
    microstates = [v.conj() for v in gram_factor(r.r)]
    d = r.d
    return ExtendedSuperoperator(
        d, (d, d, d), _microstate_images(microstates), trace_preserving=True
    )


def apply_ext(e: ExtendedSuperoperator, rho_a: DensityMatrix) -> DensityMatrix:
    """Output state ``sum_kl <k|rho_a|l> E_kl``, validated."""
    if rho_a.dim != e.d_a:
        raise ValueError(f"state dimension {rho_a.dim} != object dimension {e.d_a}")
    out = np.einsum("kl,klij->ij", rho_a.matrix, e.images)
    return DensityMatrix(out, e.dims_out)


def restrict(e: ExtendedSuperoperator) -> Superoperator:
    """Trace out everything but the object, giving an ordinary map on it."""
    if e.dims_out[0] != e.d_a:
        raise ValueError("output space does not carry the object as its first factor")
    d = e.d_a
    m = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            m[:, l * d + k] = vec(partial_trace_matrix(e.images[k, l], e.dims_out, [0]))
    return Superoperator(d, d, m, trace_preserving=e.trace_preserving)


def rect_matrix(e: ExtendedSuperoperator) -> np.ndarray:
    """Rectangular matrix view: column ``(k, l)`` is ``vec(E_kl)``.

    Columns follow the same column-stacked ordering as vectorized input
    operators, so the shape is ``(dim_out**2, d_a**2)``.
    """
    d = e.d_a
    m = np.empty((e.dim_out**2, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            m[:, l * d + k] = vec(e.images[k, l])
    return m


def from_rect_matrix(
    m, d_a: int, dims_out, trace_preserving: bool = False
) -> ExtendedSuperoperator:
    """Rebuild the image set from its rectangular matrix view."""
    dims_out = tuple(int(d) for d in dims_out)
    d_out = int(np.prod(dims_out))
    arr = as_matrix(m, name="rectangular matrix")
    if arr.shape != (d_out * d_out, d_a * d_a):
        raise ValueError(f"rectangular matrix shape {arr.shape} does not match dims")
    images = np.empty((d_a, d_a, d_out, d_out), dtype=complex)
    for k in range(d_a):
        for l in range(d_a):
            images[k, l] = arr[:, l * d_a + k].reshape((d_out, d_out), order="F")
    return ExtendedSuperoperator(d_a, dims_out, images, trace_preserving=trace_preserving)


def is_completely_positive_ext(e: ExtendedSuperoperator, tol: float = TOL_EIG) -> bool:
    """PSD test of the block witness ``sum_kl E_kl (x) |k><l|``."""
    d = e.d_a
    c = np.zeros((e.dim_out * d, e.dim_out * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            c += np.kron(e.images[k, l], basis_op(d, k, l))
    if hermiticity_defect(c) > TOL_EIG:
        return False
    return float(np.linalg.eigvalsh(c)[0]) >= -tol


def psi_from_unitary(u, fixed_input: StateVector) -> PsiRepresentation:
    """Row vectors ``psi_k = U(|k> (x) fixed_input)`` of a unitary realization."""
    m = as_matrix(getattr(u, "matrix", u), name="unitary")
    if m.shape[0] != m.shape[1] or unitarity_defect(m) > TOL_EIG:
        raise ValueError("psi_from_unitary expects a unitary matrix")
    phi = fixed_input.amplitudes
    if m.shape[0] % phi.size != 0:
        raise ValueError("fixed input dimension does not divide the unitary dimension")
    d_a = m.shape[0] // phi.size
    rows = np.vstack([m @ np.kron(basis_ket(d_a, k), phi) for k in range(d_a)])
    return PsiRepresentation(rows, (d_a,) + fixed_input.dims)
