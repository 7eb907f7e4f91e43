import numpy as np
import pytest

from entmeas import (
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
from entmeas.sampling import make_rng, random_density_matrix, random_entanglement_matrix


def kron_oracle(a, b):
    """Index formula (A x B)[(i*p + k), (j*q + l)] = A[i, j] * B[k, l]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    p, q = b.shape
    out = np.zeros((a.shape[0] * p, a.shape[1] * q), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = a[i, j] * b[k, l]
    return out


class TestKron:
    def test_identity_case(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_scalar_factor(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        np.testing.assert_array_equal(kron(x, np.array([[1.0]])), x)

    def test_diagonal_against_index_formula(self):
        a = np.diag([1.0, 2.0])
        b = np.diag([3.0, 4.0])
        expected = np.diag([3.0, 4.0, 6.0, 8.0])
        np.testing.assert_allclose(kron(a, b), expected)
        np.testing.assert_allclose(kron_oracle(a, b), expected)

    def test_random_against_index_formula(self):
        rng = make_rng(7)
        a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        np.testing.assert_allclose(kron(a, b), kron_oracle(a, b), atol=1e-14)

    def test_associative_and_bilinear(self):
        rng = make_rng(11)
        for _ in range(5):
            a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
            alpha = complex(rng.normal(), rng.normal())
            np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-13)
            np.testing.assert_allclose(
                kron(alpha * a + b, c), alpha * kron(a, c) + kron(b, c), atol=1e-13
            )


class TestVec:
    def test_column_stacking_order(self):
        m = np.array([[1, 2], [3, 4]], dtype=complex)
        np.testing.assert_array_equal(vec(m), [1, 3, 2, 4])

    def test_round_trip(self):
        rng = make_rng(3)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        np.testing.assert_array_equal(unvec(vec(m), 3), m)


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="negative"):
            DensityMatrix(np.array([[1.5, 0.0], [0.0, -0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2))

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError, match="dims"):
            DensityMatrix(np.eye(4) / 4, dims=(3, 2))

    def test_from_ket(self):
        rho = DensityMatrix.from_ket(np.ones(2) / np.sqrt(2))
        np.testing.assert_allclose(rho.matrix, np.full((2, 2), 0.5))

    def test_matrix_is_read_only(self):
        rho = maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 9.0


class TestStateVector:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="normalized"):
            StateVector(np.array([1.0, 1.0]))

    def test_density_round_trip(self):
        psi = StateVector(np.array([1.0, 1.0]) / np.sqrt(2), (2,))
        assert psi.density().dims == (2,)


class TestPartialTrace:
    def test_product_state(self):
        rng = make_rng(5)
        rho_a = random_density_matrix(2, rng)
        rho_b = random_density_matrix(3, rng)
        joint = DensityMatrix(kron(rho_a.matrix, rho_b.matrix), dims=(2, 3))
        np.testing.assert_allclose(partial_trace(joint, [0]).matrix, rho_a.matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, [1]).matrix, rho_b.matrix, atol=1e-12)

    def test_maximally_entangled_marginal(self):
        bell = DensityMatrix.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2), dims=(2, 2))
        np.testing.assert_allclose(partial_trace(bell, [1]).matrix, np.eye(2) / 2, atol=1e-12)

    def test_cloned_basis_contraction(self):
        # tracing the apparatus out of sum_ij c_ij |ii><jj| keeps only i == j
        rng = make_rng(9)
        r = random_entanglement_matrix(3, rng)
        rho = random_density_matrix(3, rng)
        joint = np.zeros((9, 9), dtype=complex)
        for i in range(3):
            for j in range(3):
                joint[i * 3 + i, j * 3 + j] = r.r[i, j] * rho.matrix[i, j]
        traced = partial_trace_matrix(joint, (3, 3), [0])
        np.testing.assert_allclose(traced, np.diag(np.diagonal(rho.matrix)), atol=1e-12)

    def test_sequential_equals_joint(self):
        # tracing out subsystems one at a time matches tracing them at once
        rho = random_density_matrix(8, make_rng(13), dims=(2, 2, 2))
        joint = partial_trace(rho, [2])
        sequential = partial_trace(partial_trace(rho, [1, 2]), [1])
        np.testing.assert_allclose(sequential.matrix, joint.matrix, atol=1e-12)

    def test_errors(self):
        rho = maximally_mixed(4, dims=(2, 2))
        with pytest.raises(ValueError, match="at least one"):
            partial_trace(rho, [])
        with pytest.raises(ValueError, match="out of range"):
            partial_trace(rho, [2])


class TestHermitianEig:
    def test_diagonal_input(self):
        evals, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(evals, [3.0, 2.0, 1.0])

    def test_flip_spectrum(self):
        evals, _ = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(evals, [1.0, -1.0], atol=1e-12)

    def test_two_vector_mixture_spectrum(self):
        # eigenvalues of the record mixture at p = (1/2, 1/2) are (1 +- |q|)/2
        q = 0.5
        v1 = np.array([1.0, 0.0])
        v2 = np.array([q, np.sqrt(1 - q**2)])
        rho_d = 0.5 * np.outer(v1, v1) + 0.5 * np.outer(v2, v2)
        evals, _ = hermitian_eig(rho_d)
        np.testing.assert_allclose(evals, [0.75, 0.25], atol=1e-12)

    def test_reconstruction_random(self):
        rng = make_rng(17)
        for n in (2, 5, 16):
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            h = (g + g.conj().T) / 2
            evals, evecs = hermitian_eig(h)
            np.testing.assert_allclose(evecs @ np.diag(evals) @ evecs.conj().T, h, atol=1e-9)
            np.testing.assert_allclose(evecs.conj().T @ evecs, np.eye(n), atol=1e-9)

    def test_phase_convention_deterministic(self):
        h = np.array([[1.0, 1j], [-1j, 1.0]])
        _, evecs = hermitian_eig(h)
        for j in range(2):
            pivot = evecs[np.argmax(np.abs(evecs[:, j])), j]
            assert abs(pivot.imag) < 1e-12 and pivot.real > 0

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestIsPsd:
    def test_identity(self):
        assert is_psd(np.eye(3))

    def test_frustrated_off_diagonals(self):
        # circulant spectrum 1 + 2c, 1 - c with c = -0.9 gives {-0.8, 1.9, 1.9}
        m = np.full((3, 3), -0.9) + np.diag([1.9, 1.9, 1.9])
        evals = np.linalg.eigvalsh(m)
        np.testing.assert_allclose(sorted(evals), [-0.8, 1.9, 1.9], atol=1e-12)
        assert not is_psd(m)

    @pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 0.3 + 0.4j])
    def test_pair_coherence_is_psd(self, q):
        m = np.array([[1.0, q], [np.conj(q), 1.0]])
        assert is_psd(m)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestGramFactor:
    def test_orthogonal_case(self):
        v = gram_factor(np.eye(2))
        np.testing.assert_allclose(v[0], basis_ket(2, 0), atol=1e-14)
        np.testing.assert_allclose(v[1], basis_ket(2, 1), atol=1e-14)

    def test_rank_one_case(self):
        v = gram_factor(np.ones((2, 2)))
        np.testing.assert_allclose(v[0], v[1], atol=1e-12)

    @pytest.mark.parametrize("q", [0.5, -0.25, 0.3 + 0.4j, 1.0])
    def test_fixed_microstates(self, q):
        """The second vector is (q, sqrt(1 - |q|^2)) under the row-phase fix."""
        r = np.array([[1.0, q], [np.conj(q), 1.0]])
        v = gram_factor(r)
        np.testing.assert_allclose(v[0], [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(v[1], [q, np.sqrt(1 - abs(q) ** 2)], atol=1e-12)

    def test_gram_reproduced_random(self):
        rng = make_rng(23)
        for d in (2, 3, 4):
            for real in (False, True):
                r = random_entanglement_matrix(d, rng, real=real)
                v = gram_factor(r.r)
                gram = np.array([[np.vdot(a, b) for b in v] for a in v])
                np.testing.assert_allclose(gram, r.r, atol=1e-9)
                for vi in v:
                    assert abs(np.linalg.norm(vi) - 1.0) < 1e-9

    def test_first_vector_is_leading_basis_ket(self):
        r = random_entanglement_matrix(4, make_rng(29))
        np.testing.assert_allclose(gram_factor(r.r)[0], basis_ket(4, 0), atol=1e-12)

    def test_rejects_non_psd(self):
        m = np.full((3, 3), -0.9) + np.diag([1.9, 1.9, 1.9])
        with pytest.raises(ValueError, match="positive semidefinite"):
            gram_factor(m)

    def test_rejects_bad_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            gram_factor(np.diag([1.0, 2.0]))

    def test_basis_op(self):
        op = basis_op(3, 0, 2)
        assert op[0, 2] == 1.0 and np.count_nonzero(op) == 1
