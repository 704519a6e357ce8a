import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kreinkit import krein, linalg
from kreinkit.errors import DimensionError, HypothesisError, NotHermitianError, SingularMatrixError

from conftest import ginibre

J0 = krein.make_minkowski(2)
A23 = np.array([[1, -1], [1, -2]], dtype=complex)
B23 = np.array([[1, -1], [1, -3]], dtype=complex)
SEED = 0x1234


def spaces():
    """Minkowski and random-J spaces of dimension 2..6."""
    return st.builds(
        lambda n, s, mink: krein.make_minkowski(n) if mink else krein.random_space(n, s),
        st.integers(2, 6),
        st.integers(0, 2**31),
        st.booleans(),
    )


class TestSpaces:
    def test_minkowski_2(self):
        np.testing.assert_array_equal(J0.J, np.diag([1, -1]))
        assert J0.signature == (1, 1)

    def test_minkowski_4(self):
        K = krein.make_minkowski(4)
        np.testing.assert_array_equal(K.J, np.diag([1, 1, 1, -1]))
        e = np.eye(4)
        assert krein.indefinite_inner(e[0], e[0], K) == 1
        assert krein.indefinite_inner(e[3], e[3], K) == -1
        assert K.is_minkowski()

    def test_rejects_non_involution(self):
        with pytest.raises(ValueError):
            krein.KreinSpace(np.diag([1.0, 2.0]))

    def test_trivial_symmetry_needs_flag(self):
        with pytest.raises(ValueError):
            krein.KreinSpace(np.eye(2))
        assert krein.hilbert_space(2).signature == (2, 0)

    @given(st.integers(2, 6), st.integers(0, 2**31))
    def test_random_space_is_involution(self, n, seed):
        K = krein.random_space(n, seed)
        assert np.linalg.norm(K.J @ K.J - np.eye(n)) <= 1e-12 * n
        assert np.linalg.norm(K.J - K.J.conj().T) <= 1e-12 * n
        P, M = K.projections()
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(P + M, np.eye(n), atol=1e-15)
        assert round(np.trace(P).real) == K.p

    def test_augment_and_direct_sum(self):
        K = krein.augment(J0, 2)
        np.testing.assert_array_equal(K.J, np.diag([1, -1, 1, 1]))
        assert krein.direct_sum(J0, J0).signature == (2, 2)
        assert krein.diagonal_space(2, 3).signature == (2, 3)


class TestAdjoint:
    def test_hilbert_adjoint_is_conjugate_transpose(self, rng):
        H = krein.hilbert_space(3)
        A = ginibre(rng, 3)
        np.testing.assert_allclose(krein.j_adjoint(A, H), A.conj().T)

    def test_diagonal_commutes(self):
        C = np.diag([0.5, 2.0])
        np.testing.assert_allclose(krein.j_adjoint(C, J0), C)

    def test_ex_pair_selfadjoint(self):
        np.testing.assert_allclose(krein.j_adjoint(A23, J0), A23)
        ok, res = krein.is_j_selfadjoint(A23, J0)
        assert ok and res == 0

    @given(spaces(), st.integers(0, 2**31))
    def test_involutive_and_antimultiplicative(self, K, seed):
        rng = np.random.default_rng(seed)
        A, B = ginibre(rng, K.dim), ginibre(rng, K.dim)
        np.testing.assert_allclose(krein.j_adjoint(krein.j_adjoint(A, K), K), A, atol=1e-12)
        lhs = krein.j_adjoint(A @ B, K)
        rhs = krein.j_adjoint(B, K) @ krein.j_adjoint(A, K)
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)

    @given(spaces(), st.integers(0, 2**31))
    def test_defining_identity(self, K, seed):
        rng = np.random.default_rng(seed)
        A = ginibre(rng, K.dim)
        x, y = ginibre(rng, K.dim, 1)[:, 0], ginibre(rng, K.dim, 1)[:, 0]
        lhs = krein.indefinite_inner(A @ x, y, K)
        rhs = krein.indefinite_inner(x, krein.j_adjoint(A, K) @ y, K)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))

    def test_rectangular_between_spaces(self, rng):
        K1, K2 = krein.make_minkowski(2), krein.make_minkowski(3)
        A = ginibre(rng, 3, 2)
        As = krein.j_adjoint(A, K1, K2)
        assert As.shape == (2, 3)
        np.testing.assert_allclose(As, K1.J @ A.conj().T @ K2.J)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            krein.j_adjoint(np.eye(3), J0)


class TestOrder:
    def test_ex_pair_positive(self):
        assert krein.is_j_positive(A23, J0).is_positive
        assert krein.is_j_positive(B23, J0).is_positive

    def test_symmetry_is_positive(self):
        assert krein.is_j_positive(J0.J, J0).verdict == "positive"

    def test_positive_from_either_side(self):
        # JA ⪰ 0 and AJ ⪰ 0 are equivalent for J-selfadjoint A
        assert krein.is_j_positive_right(A23, J0).is_positive

    def test_ex_midpoint_gap(self):
        sq = lambda M: M @ M  # noqa: E731
        v = krein.j_order_verdict(sq((A23 + B23) / 2), (sq(A23) + sq(B23)) / 2, J0)
        np.testing.assert_allclose(v.gap, [[0, 0], [0, -0.25]], atol=1e-12)
        assert v.relation != "leq" and not v.holds

    def test_non_selfadjoint_raises(self):
        with pytest.raises(NotHermitianError):
            krein.j_order_verdict(np.array([[0, 1], [0, 0]]), np.eye(2), J0)

    def test_relation_names(self):
        assert krein.order_from_gap(np.zeros((2, 2))).relation == "equal"
        assert krein.order_from_gap(np.eye(2)).relation == "leq"
        assert krein.order_from_gap(-np.eye(2)).relation == "geq"
        assert krein.order_from_gap(J0.J).relation == "incomparable"

    def test_positive_not_implied_either_way(self):
        # A ⪰ 0 without JA ⪰ 0, and JB ⪰ 0 without B ⪰ 0
        A = np.eye(2)
        assert not krein.is_j_positive(A, J0).is_positive
        assert krein.is_j_positive(J0.J, J0).is_positive
        assert not linalg.psd_verdict(J0.J).is_positive

    @given(spaces(), st.integers(0, 2**31))
    def test_order_is_congruence_invariant(self, K, seed):
        # A ≤ B implies U♯AU ≤ U♯BU for J-unitary U
        A = krein.sample_j_positive(K, seed, 0)
        U = krein.sample_j_unitary(K, seed, 1)
        Us = krein.j_adjoint(U, K)
        v = krein.j_order_verdict(np.zeros_like(A), Us @ A @ U, K)
        assert v.relation == "leq"


class TestContractions:
    def test_identity(self):
        v = krein.is_j_contraction(np.eye(2), J0)
        assert v.verdict == "zero"

    def test_canonical(self):
        C = np.diag([0.5, 2.0])
        v = krein.is_j_contraction(C, J0)
        gap = J0.J - C.conj().T @ J0.J @ C
        np.testing.assert_allclose(gap, np.diag([0.75, 3.0]))
        assert v.is_positive
        rep = krein.is_j_bicontraction(C, J0)
        assert rep.is_bicontraction and rep.c11_invertible and rep.criteria_agree

    def test_reversed_is_not_contraction(self):
        C = np.diag([2.0, 0.5])
        np.testing.assert_allclose(J0.J - C @ J0.J @ C, np.diag([-3.0, -0.75]))
        assert not krein.is_j_contraction(C, J0).is_positive

    def test_invertible_contraction_with_singular_c11(self):
        # C11 invertibility is sufficient but not necessary
        C = np.array([[0, 1], [1, 2]], dtype=complex)
        assert linalg.is_invertible(C)
        rep = krein.is_j_bicontraction(C, J0)
        assert rep.contraction.is_positive and rep.adjoint_contraction.is_positive
        assert rep.is_bicontraction
        assert not rep.c11_invertible
        assert rep.c22_invertible and rep.criteria_agree

    def test_non_contraction_reports_no_bicontraction(self):
        rep = krein.is_j_bicontraction(np.diag([2.0, 0.5]), J0)
        assert not rep.is_bicontraction

    def test_invertible_contractions_are_bicontractions(self):
        for i in range(1000):
            K = krein.make_minkowski(2 + i % 5) if i % 2 == 0 else krein.random_space(2 + i % 5, SEED, i)
            C = krein.sample_invertible_j_contraction(K, SEED, i)
            rep = krein.is_j_bicontraction(C, K)
            assert rep.is_bicontraction, i
            assert rep.criteria_agree, i
            assert rep.c11_invertible, (i, rep.c11_ratio)


class TestBlocks:
    def test_symmetry_blocks(self):
        K = krein.diagonal_space(2, 1)
        b = krein.block_decompose(K.J, K)
        np.testing.assert_allclose(b.C11, np.eye(2))
        np.testing.assert_allclose(b.C22, -np.eye(1))
        assert np.all(b.C12 == 0) and np.all(b.C21 == 0)

    def test_canonical_blocks(self):
        b = krein.block_decompose(np.diag([0.5, 2.0]), J0)
        np.testing.assert_allclose(np.abs(b.C11), [[0.5]])
        np.testing.assert_allclose(np.abs(b.C22), [[2.0]])
        assert np.all(b.C12 == 0) and np.all(b.C21 == 0)

    @given(spaces(), st.integers(0, 2**31))
    def test_resolution_of_identity(self, K, seed):
        C = ginibre(np.random.default_rng(seed), K.dim)
        np.testing.assert_allclose(krein.block_decompose(C, K).reassemble(), C, atol=1e-12)
        P, M = K.projections()
        np.testing.assert_allclose(P @ C @ P + P @ C @ M + M @ C @ P + M @ C @ M, C, atol=1e-12)


class TestPositiveDecomposition:
    def test_symmetry(self):
        np.testing.assert_allclose(krein.jpositive_decompose(J0.J, J0), np.eye(2))

    def test_ex_pair(self):
        At = krein.jpositive_decompose(A23, J0)
        np.testing.assert_allclose(At, [[1, -1], [-1, 2]])
        np.testing.assert_allclose(linalg.hermitian_eig(At).eigenvalues, [(3 - 5**0.5) / 2, (3 + 5**0.5) / 2])

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            krein.jpositive_decompose(J0.J @ np.diag([1.0, 0.0]), J0)

    def test_not_positive(self):
        with pytest.raises(HypothesisError):
            krein.jpositive_decompose(np.eye(2), J0)


class TestSamplers:
    def test_moduli_seed_gives_canonical(self):
        C = krein.contraction_from_moduli([0.5, 2.0], J0)
        np.testing.assert_allclose(C, np.diag([0.5, 2.0]))

    def test_zero_generator(self):
        np.testing.assert_allclose(krein.j_unitary_from_generator(np.zeros((3, 3)), krein.make_minkowski(3)), np.eye(3))

    def test_generator_must_be_skew(self):
        with pytest.raises(ValueError):
            krein.j_unitary_from_generator(np.eye(2), J0)

    @given(spaces(), st.integers(0, 2**31), st.integers(0, 100))
    def test_samples_pass_their_predicates(self, K, seed, index):
        A = krein.sample_j_positive(K, seed, index)
        assert krein.is_j_positive(A, K).is_positive and linalg.is_invertible(A)
        assert krein.is_j_selfadjoint(A, K)[0]
        A0 = krein.sample_j_positive(K, seed, index, invertible=False)
        assert krein.is_j_positive(A0, K).is_positive and not linalg.is_invertible(A0)
        U = krein.sample_j_unitary(K, seed, index)
        assert krein.is_j_unitary(U, K)[0]
        iso, co = krein.is_j_isometry_unitary(U, K)
        assert iso <= 1e-9 and co <= 1e-9
        C = krein.sample_invertible_j_contraction(K, seed, index)
        assert krein.is_j_contraction(C, K).is_positive and linalg.is_invertible(C)

    def test_reproducible(self):
        K = krein.make_minkowski(3)
        a = krein.sample_invertible_j_contraction(K, 7, 3)
        b = krein.sample_invertible_j_contraction(K, 7, 3)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, krein.sample_invertible_j_contraction(K, 7, 4))
