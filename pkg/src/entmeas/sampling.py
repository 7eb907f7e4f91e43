"""Seeded random states and coherence matrices for the check suites."""

from __future__ import annotations

import numpy as np

from .linalg import DensityMatrix
from .superop import EntanglementMatrix


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def random_ket(dim: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    z = rng.normal(size=dim)
    if not real:
        z = z + 1j * rng.normal(size=dim)
    z = np.asarray(z, dtype=complex)
    return z / np.linalg.norm(z)


def random_pure_density_matrix(
    dim: int, rng: np.random.Generator, dims=None
) -> DensityMatrix:
    return DensityMatrix.from_ket(random_ket(dim, rng), dims)


def random_density_matrix(dim: int, rng: np.random.Generator, dims=None) -> DensityMatrix:
    """Full-rank random mixed state from a Ginibre factor."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_entanglement_matrix(
    d: int, rng: np.random.Generator, real: bool = False
) -> EntanglementMatrix:
    """PSD unit-diagonal matrix built as the Gram matrix of random kets."""
    kets = [random_ket(d, rng, real=real) for _ in range(d)]
    r = np.array([[np.vdot(a, b) for b in kets] for a in kets])
    return EntanglementMatrix(r)


def random_non_psd_unit_diagonal(
    d: int, rng: np.random.Generator, real: bool = False
) -> EntanglementMatrix:
    """Hermitian unit-diagonal matrix with an eigenvalue safely below zero."""
    scale = 0.9
    while True:
        noise = rng.normal(size=(d, d))
        if not real:
            noise = noise + 1j * rng.normal(size=(d, d))
        h = scale * (noise + noise.conj().T) / 2.0
        np.fill_diagonal(h, 1.0)
        if float(np.linalg.eigvalsh(h)[0]) < -1e-6:
            return EntanglementMatrix(h)
        scale *= 1.5
