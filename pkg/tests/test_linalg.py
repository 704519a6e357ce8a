import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kreinkit import linalg
from kreinkit.errors import DimensionError, HypothesisError, NotHermitianError, SingularMatrixError

from conftest import ginibre

S3 = np.sqrt(3.0)
A23 = np.array([[1, -1], [1, -2]], dtype=complex)
J0 = np.diag([1.0, -1.0]).astype(complex)


class TestHermitianEig:
    def test_identity(self):
        es = linalg.hermitian_eig(np.eye(2))
        np.testing.assert_allclose(es.eigenvalues, [1, 1])
        np.testing.assert_allclose(np.abs(es.vectors), np.eye(2), atol=1e-15)

    def test_involution_spectrum(self):
        np.testing.assert_allclose(linalg.hermitian_eig(J0).eigenvalues, [-1, 1])

    def test_two_by_two_characteristic_polynomial(self):
        # J0 A = [[1,-1],[-1,2]] has characteristic polynomial t^2 - 3t + 1
        M = J0 @ A23
        np.testing.assert_allclose(M, [[1, -1], [-1, 2]])
        w = linalg.hermitian_eig(M).eigenvalues
        np.testing.assert_allclose(w, [(3 - np.sqrt(5)) / 2, (3 + np.sqrt(5)) / 2], rtol=1e-14)
        assert np.all(w > 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            linalg.hermitian_eig(A23)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            linalg.hermitian_eig(np.ones((2, 3)))

    @given(st.integers(1, 8), st.integers(0, 2**31))
    def test_reconstruction_and_orthonormality(self, n, seed):
        G = ginibre(np.random.default_rng(seed), n)
        H = G + G.conj().T
        es = linalg.hermitian_eig(H)
        V = es.vectors
        scale = max(1.0, np.linalg.norm(H))
        assert np.linalg.norm(V @ np.diag(es.eigenvalues) @ V.conj().T - H) <= 1e-12 * scale
        assert np.linalg.norm(V.conj().T @ V - np.eye(n)) <= 1e-12
        assert np.all(np.diff(es.eigenvalues) >= 0)

    @given(st.integers(1, 8), st.integers(0, 2**31))
    def test_matches_lapack(self, n, seed):
        G = ginibre(np.random.default_rng(seed), n)
        H = G @ G.conj().T - 1.5 * np.eye(n)
        np.testing.assert_allclose(linalg.hermitian_eig(H).eigenvalues, np.linalg.eigvalsh(H), atol=1e-12)

    def test_degenerate_clusters(self, rng):
        Q, _ = np.linalg.qr(ginibre(rng, 6))
        H = Q @ np.diag([1, 1, 1, -2, -2, 5.0]) @ Q.conj().T
        es = linalg.hermitian_eig(H)
        np.testing.assert_allclose(es.eigenvalues, [-2, -2, 1, 1, 1, 5], atol=1e-13)
        assert np.linalg.norm(es.reconstruct() - H) <= 1e-12


class TestPsdVerdict:
    def test_zero(self):
        assert linalg.psd_verdict(np.zeros((2, 2))).verdict == "zero"

    def test_negative_gap(self):
        v = linalg.psd_verdict(np.array([[0, 0], [0, -0.25]]))
        assert v.verdict == "negative"
        assert v.is_negative and not v.is_positive
        assert v.min_eigenvalue == pytest.approx(-0.25)

    def test_indefinite(self):
        assert linalg.psd_verdict(J0).verdict == "indefinite"

    def test_positive(self):
        v = linalg.psd_verdict(np.diag([1.0, 2.0]))
        assert v.verdict == "positive" and v.is_positive

    def test_tolerance_scales(self):
        v = linalg.psd_verdict(np.diag([1e6, -1e-4]))
        assert v.tolerance_used == pytest.approx(1e-3)
        assert v.verdict == "positive"

    def test_to_dict(self):
        d = linalg.psd_verdict(J0).to_dict()
        assert set(d) == {"verdict", "min_eigenvalue", "max_eigenvalue", "tolerance_used"}


class TestPsdFactor:
    def test_identity(self):
        F = linalg.psd_factor(np.eye(2))
        np.testing.assert_allclose(F @ F.conj().T, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(F.conj().T @ F, np.eye(2), atol=1e-15)

    def test_diagonal_square_roots(self):
        M = np.diag([0.75, 3.0])
        F = linalg.psd_factor(M)
        # up to a right unitary: F*F is diagonal with the same entries
        np.testing.assert_allclose(np.sort(np.abs(F).max(axis=0)), [S3 / 2, S3], rtol=1e-14)
        np.testing.assert_allclose(F @ F.conj().T, M, atol=1e-14)

    def test_rank_one_projection(self):
        F = linalg.psd_factor(np.diag([1.0, 0.0]))
        assert F.shape == (2, 1)
        np.testing.assert_allclose(np.abs(F[:, 0]), [1, 0])

    def test_zero_matrix(self):
        assert linalg.psd_factor(np.zeros((3, 3))).shape == (3, 0)

    def test_rejects_indefinite(self):
        with pytest.raises(HypothesisError):
            linalg.psd_factor(J0)

    def test_thousand_gram_matrices(self, rng):
        for k in range(1000):
            n = 1 + k % 6
            r = 1 + k % n
            G = ginibre(rng, n, r)
            M = G @ G.conj().T
            F = linalg.psd_factor(M)
            assert F.shape == (n, r)
            assert np.linalg.norm(F @ F.conj().T - M) <= 1e-10 * max(1.0, np.linalg.norm(M))
            assert np.linalg.matrix_rank(F) == r


class TestSpectrum:
    def test_diagonal(self):
        np.testing.assert_allclose(linalg.spectrum(np.diag([2.0, 5.0])), [2, 5])

    def test_ex_pair(self):
        w = linalg.spectrum(A23)
        np.testing.assert_allclose(w, [(-1 - np.sqrt(5)) / 2, (-1 + np.sqrt(5)) / 2], atol=1e-14)
        assert np.all(np.abs(w.imag) <= 1e-14)

    def test_nilpotent(self):
        N = np.array([[1, 1], [-1, -1]], dtype=complex)
        np.testing.assert_allclose(N @ N, 0)
        assert np.all(np.abs(linalg.spectrum(N)) <= 1e-7)

    def test_dimension_limit(self):
        with pytest.raises(DimensionError):
            linalg.spectrum(np.eye(33))

    def test_conjugate_ordering(self):
        R = np.array([[0, -1], [1, 0]], dtype=float)
        w = linalg.spectrum(R)
        np.testing.assert_allclose(w, [-1j, 1j], atol=1e-15)

    def test_matches_hermitian_route(self, rng):
        for n in range(1, 7):
            G = ginibre(rng, n)
            H = G + G.conj().T
            np.testing.assert_allclose(linalg.spectrum(H).real, linalg.hermitian_eig(H).eigenvalues, atol=1e-12)

    def test_match_spectra(self):
        assert linalg.match_spectra([1, 2, 3j], [3j, 1, 2]) == 0.0
        assert linalg.match_spectra([0, 1], [0, 1.5]) == pytest.approx(0.5)


class TestSolvers:
    def test_solve_identity(self, rng):
        B = ginibre(rng, 3, 2)
        np.testing.assert_allclose(linalg.solve(np.eye(3), B), B)

    def test_inverse_diagonal(self):
        np.testing.assert_allclose(linalg.inverse(np.diag([0.5, 2.0])), np.diag([2.0, 0.5]))

    def test_pinv_diagonal(self):
        np.testing.assert_allclose(linalg.pinv(np.diag([S3 / 2, S3])), np.diag([2 / S3, 1 / S3]), rtol=1e-14)

    def test_pinv_rectangular(self, rng):
        G = ginibre(rng, 4, 2)
        P = linalg.pinv(G)
        np.testing.assert_allclose(P @ G, np.eye(2), atol=1e-13)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            linalg.inverse(np.diag([1.0, 0.0]))
        assert not linalg.is_invertible(np.diag([1.0, 1e-12]))


class TestExpm:
    def test_zero(self):
        np.testing.assert_allclose(linalg.expm(np.zeros((3, 3))), np.eye(3))

    def test_nilpotent(self):
        N = np.array([[1, 1], [-1, -1]], dtype=complex)
        np.testing.assert_allclose(linalg.expm(N), np.eye(2) + N, atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(linalg.expm(np.diag([1.0, -2.0])), np.diag(np.exp([1.0, -2.0])), rtol=1e-14)

    @given(st.integers(1, 6), st.integers(0, 2**31))
    def test_skew_hermitian_gives_unitary(self, n, seed):
        G = ginibre(np.random.default_rng(seed), n) * 2
        U = linalg.expm(G - G.conj().T)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-12

    def test_against_scipy(self, rng):
        from scipy.linalg import expm as scipy_expm

        for n in range(1, 6):
            A = ginibre(rng, n) * 3
            np.testing.assert_allclose(linalg.expm(A), scipy_expm(A), rtol=1e-11, atol=1e-11)


def test_direct_sum():
    M = linalg.direct_sum(np.eye(1), 2 * np.eye(2))
    np.testing.assert_allclose(M, np.diag([1, 2, 2]))


def test_norms():
    assert linalg.fro(np.eye(4)) == pytest.approx(2.0)
    assert linalg.opnorm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
