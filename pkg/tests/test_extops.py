import numpy as np
import pytest

from entmeas import (
    DensityMatrix,
    EntanglementMatrix,
    ExtendedSuperoperator,
    KrausSet,
    StateVector,
    apply_ext,
    basis_ket,
    basis_op,
    cloning_superop,
    compose,
    extend,
    extended_entangling,
    extended_entangling_abd,
    entangling_measurement,
    from_rect_matrix,
    gram_factor,
    identity_superop,
    is_completely_positive_ext,
    kron,
    partial_trace_matrix,
    projective,
    psi_from_unitary,
    rect_matrix,
    restrict,
    superop_from_kraus,
    unitary_superop,
)
from entmeas.dilation import cloning_unitary, default_assignment
from entmeas.sampling import (
    make_rng,
    random_density_matrix,
    random_entanglement_matrix,
    random_non_psd_unit_diagonal,
    random_pure_density_matrix,
)

PLUS = DensityMatrix.from_ket(np.ones(2) / np.sqrt(2))


def entangling_images_oracle(r):
    """Direct term-by-term assembly of the pairwise-coherence images."""
    d = r.d
    images = np.zeros((d, d, d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            ket = kron(basis_ket(d, k), basis_ket(d, k))
            bra = kron(basis_ket(d, l), basis_ket(d, l))
            images[k, l] = r.r[k, l] * np.outer(ket, bra.conj())
    return images


class TestExtend:
    def test_identity_extension(self):
        rng = make_rng(1)
        rho_b = random_density_matrix(2, rng)
        e = extend(identity_superop(4), rho_b)
        for k in range(2):
            for l in range(2):
                np.testing.assert_allclose(
                    e.images[k, l], kron(basis_op(2, k, l), rho_b.matrix), atol=1e-14
                )

    def test_entangling_extension_ignores_apparatus(self):
        rng = make_rng(2)
        m = entangling_measurement(random_entanglement_matrix(2, rng))
        extensions = [extend(m, random_density_matrix(2, rng)) for _ in range(10)]
        for e in extensions[1:]:
            np.testing.assert_allclose(e.images, extensions[0].images, atol=1e-12)

    def test_entangling_extension_equals_direct_form(self):
        rng = make_rng(3)
        r = random_entanglement_matrix(3, rng)
        e = extend(entangling_measurement(r), random_density_matrix(3, rng))
        np.testing.assert_allclose(e.images, extended_entangling(r).images, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="divisible"):
            extend(identity_superop(4), random_density_matrix(3, make_rng(4)))

    def test_several_maps_share_one_extension(self):
        # composing with an apparatus reset does not change the extension
        d = 2
        reset = superop_from_kraus(
            KrausSet(tuple(kron(np.eye(d), basis_op(d, 0, m)) for m in range(d)))
        )
        uc = unitary_superop(cloning_unitary(default_assignment(d)).matrix)
        ground = DensityMatrix(basis_op(d, 0, 0))
        lhs = extend(compose(uc, reset), ground)
        rhs = extend(uc, ground)
        np.testing.assert_allclose(lhs.images, rhs.images, atol=1e-12)
        assert np.max(np.abs(uc.map_matrix - compose(uc, reset).map_matrix)) > 0.5


class TestExtendedEntangling:
    def test_full_coherence_gives_maximal_entanglement(self):
        e = extended_entangling(EntanglementMatrix.from_coherence(1.0))
        out = apply_ext(e, PLUS)
        bell = DensityMatrix.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2), dims=(2, 2))
        np.testing.assert_allclose(out.matrix, bell.matrix, atol=1e-12)

    def test_generic_coherence_weights(self):
        rng = make_rng(5)
        r = random_entanglement_matrix(2, rng)
        out = apply_ext(extended_entangling(r), PLUS)
        expected = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                expected[i * 2 + i, j * 2 + j] = 0.5 * r.r[i, j]
        np.testing.assert_allclose(out.matrix, expected, atol=1e-12)

    def test_images_match_oracle(self):
        r = random_entanglement_matrix(3, make_rng(6))
        np.testing.assert_allclose(
            extended_entangling(r).images, entangling_images_oracle(r), atol=1e-14
        )

    def test_projective_limit(self):
        e = extended_entangling(EntanglementMatrix.from_coherence(0.0))
        out = apply_ext(e, PLUS)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 0.5
        np.testing.assert_allclose(out.matrix, expected, atol=1e-12)

    def test_diagonal_input_ignores_r(self):
        rng = make_rng(7)
        rho = DensityMatrix(np.diag([0.3, 0.7]))
        out1 = apply_ext(extended_entangling(random_entanglement_matrix(2, rng)), rho)
        out2 = apply_ext(extended_entangling(random_entanglement_matrix(2, rng)), rho)
        expected = np.zeros((4, 4))
        expected[0, 0] = 0.3
        expected[3, 3] = 0.7
        np.testing.assert_allclose(out1.matrix, expected, atol=1e-12)
        np.testing.assert_allclose(out2.matrix, expected, atol=1e-12)


class TestExtendedEntanglingAbd:
    def test_record_trace_reproduces_pairwise_images(self):
        """The record average must hit the coherence weights exactly.

        The bra record state carries the second index, so the contraction
        gives conj(<m_l|m_k'>) bookkeeping that only works out with the
        conjugated microstate family; this is the regression test for it,
        with complex matrices included.
        """
        rng = make_rng(8)
        for d in (2, 3):
            for real in (True, False):
                r = random_entanglement_matrix(d, rng, real=real)
                abd = extended_entangling_abd(r)
                pair = extended_entangling(r)
                for k in range(d):
                    for l in range(d):
                        traced = partial_trace_matrix(abd.images[k, l], (d, d, d), [0, 1])
                        np.testing.assert_allclose(traced, pair.images[k, l], atol=1e-10)

    def test_full_coherence_output_is_pure(self):
        abd = extended_entangling_abd(EntanglementMatrix.from_coherence(1.0))
        out = apply_ext(abd, PLUS)
        evals = np.linalg.eigvalsh(out.matrix)
        np.testing.assert_allclose(evals[-1], 1.0, atol=1e-12)
        v = gram_factor(np.ones((2, 2)))
        np.testing.assert_allclose(v[0], v[1], atol=1e-12)

    def test_pure_input_stays_pure(self):
        rng = make_rng(9)
        for _ in range(5):
            r = random_entanglement_matrix(2, rng)
            rho = random_pure_density_matrix(2, rng)
            out = apply_ext(extended_entangling_abd(r), rho)
            purity = np.trace(out.matrix @ out.matrix).real
            assert abs(purity - 1.0) < 1e-10

    def test_requires_psd(self):
        with pytest.raises(ValueError, match="positive semidefinite"):
            extended_entangling_abd(random_non_psd_unit_diagonal(3, make_rng(10)))


class TestApplyExt:
    def test_identity_extension_output(self):
        rng = make_rng(11)
        rho_a = random_density_matrix(2, rng)
        rho_b = random_density_matrix(2, rng)
        out = apply_ext(extend(identity_superop(4), rho_b), rho_a)
        np.testing.assert_allclose(out.matrix, kron(rho_a.matrix, rho_b.matrix), atol=1e-12)
        assert out.dims == (2, 2)

    def test_trace_preserved_on_random_inputs(self):
        rng = make_rng(12)
        for _ in range(50):
            d = int(rng.integers(2, 4))
            e = extended_entangling_abd(random_entanglement_matrix(d, rng))
            out = apply_ext(e, random_density_matrix(d, rng))
            assert abs(np.trace(out.matrix) - 1.0) < 1e-10

    def test_dimension_mismatch(self):
        e = extended_entangling(EntanglementMatrix.identity(2))
        with pytest.raises(ValueError, match="dimension"):
            apply_ext(e, random_density_matrix(3, make_rng(13)))


class TestRestrict:
    def test_entangling_restricts_to_projective(self):
        rng = make_rng(14)
        for d in (2, 3):
            r = random_entanglement_matrix(d, rng)
            np.testing.assert_allclose(
                restrict(extended_entangling(r)).map_matrix,
                projective(d).map_matrix,
                atol=1e-12,
            )
            np.testing.assert_allclose(
                restrict(extended_entangling_abd(r)).map_matrix,
                projective(d).map_matrix,
                atol=1e-12,
            )

    def test_identity_extension_restricts_to_identity(self):
        rho_b = random_density_matrix(3, make_rng(15))
        e = extend(identity_superop(6), rho_b)
        np.testing.assert_allclose(
            restrict(e).map_matrix, identity_superop(2).map_matrix, atol=1e-12
        )


class TestRectMatrix:
    def test_shape_two_qubits(self):
        e = extended_entangling(EntanglementMatrix.from_coherence(0.5))
        assert rect_matrix(e).shape == (16, 4)

    def test_column_count_is_object_squared(self):
        e = extended_entangling_abd(EntanglementMatrix.identity(3))
        assert rect_matrix(e).shape[1] == 9

    def test_round_trip(self):
        r = random_entanglement_matrix(2, make_rng(16))
        e = extended_entangling(r)
        rebuilt = from_rect_matrix(rect_matrix(e), e.d_a, e.dims_out, trace_preserving=True)
        np.testing.assert_allclose(rebuilt.images, e.images, atol=1e-14)


class TestCompletePositivityExt:
    def test_psd_r_is_cp(self):
        rng = make_rng(17)
        assert is_completely_positive_ext(extended_entangling(random_entanglement_matrix(3, rng)))
        assert is_completely_positive_ext(
            extended_entangling_abd(random_entanglement_matrix(2, rng))
        )

    def test_non_psd_r_is_not_cp(self):
        r = random_non_psd_unit_diagonal(3, make_rng(18))
        assert not is_completely_positive_ext(extended_entangling(r))

    def test_extension_of_cp_map_is_cp(self):
        rng = make_rng(19)
        e = extend(cloning_superop(2), random_density_matrix(2, rng))
        assert is_completely_positive_ext(e)


class TestPsiRepresentation:
    def test_cloning_gate_rows(self):
        uc = cloning_unitary(default_assignment(2))
        rep = psi_from_unitary(uc.matrix, StateVector(basis_ket(2, 0), (2,)))
        np.testing.assert_allclose(
            rep.psi, [[1, 0, 0, 0], [0, 0, 0, 1]], atol=1e-14
        )

    def test_rows_are_orthonormal(self):
        rng = make_rng(20)
        g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        u, _ = np.linalg.qr(g)
        rep = psi_from_unitary(u, StateVector(basis_ket(4, 0), (4,)))
        gram = rep.psi.conj() @ rep.psi.T
        np.testing.assert_allclose(gram, np.eye(2), atol=1e-12)

    def test_images_match_extension_of_unitary_map(self):
        uc = cloning_unitary(default_assignment(2))
        fixed = StateVector(basis_ket(2, 0), (2,))
        rep = psi_from_unitary(uc.matrix, fixed)
        direct = extend(unitary_superop(uc.matrix), fixed.density())
        np.testing.assert_allclose(rep.to_extended().images, direct.images, atol=1e-12)

    @pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 0.3 + 0.4j])
    def test_images_match_extension_for_three_system_gate(self, q):
        from entmeas.dilation import combined_unitary, initial_apparatus_state

        gate = combined_unitary(EntanglementMatrix.from_coherence(q))
        fixed = initial_apparatus_state(2, 2)
        rep = psi_from_unitary(gate.matrix, fixed)
        direct = extend(unitary_superop(gate.matrix), fixed.density())
        np.testing.assert_allclose(rep.to_extended().images, direct.images, atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            psi_from_unitary(np.ones((4, 4)), StateVector(basis_ket(2, 0), (2,)))


class TestExtendedSuperoperatorType:
    def test_hermiticity_pairing_enforced(self):
        images = np.zeros((2, 2, 2, 2), dtype=complex)
        images[0, 1] = basis_op(2, 0, 1)
        images[1, 0] = basis_op(2, 0, 1)  # should be the adjoint
        images[0, 0] = basis_op(2, 0, 0)
        images[1, 1] = basis_op(2, 1, 1)
        with pytest.raises(ValueError, match="pairing"):
            ExtendedSuperoperator(2, (2,), images)

    def test_tp_flag_enforced(self):
        images = np.zeros((2, 2, 2, 2), dtype=complex)
        images[0, 0] = basis_op(2, 0, 0)
        images[1, 1] = basis_op(2, 0, 0)  # total trace 2 is fine; make it 3
        images[1, 1] = 2.0 * basis_op(2, 0, 0)
        with pytest.raises(ValueError, match="trace-preserving"):
            ExtendedSuperoperator(2, (2,), images, trace_preserving=True)
