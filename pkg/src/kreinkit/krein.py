"""Krein-space structure: fundamental symmetries, J-adjoints, J-order, samplers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionError, HypothesisError, NotHermitianError, SingularMatrixError
from .linalg import TOL_REL, PsdVerdict, as_matrix, fro, psd_verdict, require_square

INVOLUTION_TOL = 1e-12
SELFADJOINT_RTOL = 1e-9

# per-sampler salts so that A, B and C drawn at the same index are independent
_SALT_POSITIVE = 0x5051
_SALT_UNITARY = 0x5552
_SALT_CONTRACTION = 0x4354
_SALT_SYMMETRY = 0x4A53


@dataclass(frozen=True, eq=False)
class KreinSpace:
    """``C^n`` with a fundamental symmetry ``J = J* = J^{-1}``.

    ``basis`` holds an orthonormal eigenbasis of ``J`` with the ``+1``
    eigenvectors first; it is computed once at construction.
    """

    J: np.ndarray
    hilbert: bool = False
    dim: int = field(init=False)
    signature: tuple = field(init=False)
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        J = require_square(self.J, "fundamental symmetry")
        n = J.shape[0]
        if n < 1:
            raise DimensionError("Krein space must have positive dimension")
        res_h = fro(J - J.conj().T)
        res_inv = fro(J @ J - np.eye(n))
        if res_h > INVOLUTION_TOL * n or res_inv > INVOLUTION_TOL * n:
            raise ValueError(
                f"J is not a Hermitian involution (‖J−J*‖={res_h:.2e}, ‖J²−I‖={res_inv:.2e})"
            )
        es = linalg.hermitian_eig(J)
        plus = es.eigenvalues > 0
        p = int(plus.sum())
        q = n - p
        if q == 0 and not self.hilbert:
            raise ValueError("J = I is a trivial symmetry; pass hilbert=True for a Hilbert space")
        basis = np.concatenate([es.vectors[:, plus], es.vectors[:, ~plus]], axis=1)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "signature", (p, q))
        object.__setattr__(self, "basis", basis)

    @property
    def p(self):
        return self.signature[0]

    @property
    def q(self):
        return self.signature[1]

    def projections(self):
        """``(P₊, P₋) = ((I+J)/2, (I−J)/2)``."""
        eye = np.eye(self.dim)
        return (eye + self.J) / 2, (eye - self.J) / 2

    def is_minkowski(self):
        return np.array_equal(self.J, make_minkowski(self.dim).J) if self.dim >= 2 else False

    def __repr__(self):
        return f"KreinSpace(dim={self.dim}, signature={self.signature})"


def make_minkowski(n):
    """``C^n`` with ``J₀ = diag(I_{n−1}, −1)``."""
    if n < 2:
        raise ValueError("Minkowski space needs n >= 2")
    d = np.ones(n)
    d[-1] = -1.0
    return KreinSpace(np.diag(d).astype(complex))


def hilbert_space(n):
    return KreinSpace(np.eye(n, dtype=complex), hilbert=True)


def diagonal_space(p, q):
    """``J = diag(I_p, −I_q)``; ``q = 0`` gives a Hilbert space."""
    d = np.concatenate([np.ones(p), -np.ones(q)])
    return KreinSpace(np.diag(d).astype(complex), hilbert=(q == 0))


def direct_sum(*spaces):
    J = linalg.direct_sum(*(K.J for K in spaces))
    return KreinSpace(J, hilbert=all(K.q == 0 for K in spaces))


def augment(K, r):
    """``K ⊕ C^r`` with fundamental symmetry ``J ⊕ I_r``."""
    if r == 0:
        return K
    return KreinSpace(linalg.direct_sum(K.J, np.eye(r, dtype=complex)), hilbert=K.hilbert)


def random_space(n, seed, index=0, p=None):
    """``J = Q diag(I_p, −I_q) Q*`` for a Haar-like random unitary ``Q``."""
    rng = _rng(seed, index, _SALT_SYMMETRY)
    if p is None:
        p = int(rng.integers(1, n))
    Z = _ginibre(rng, n, n)
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    d = np.concatenate([np.ones(p), -np.ones(n - p)])
    J = (Q * d) @ Q.conj().T
    J = 0.5 * (J + J.conj().T)
    return KreinSpace(J, hilbert=(p == n))


# --------------------------------------------------------------------------
# Adjoints and predicates
# --------------------------------------------------------------------------


def indefinite_inner(x, y, K):
    """``[x, y]_J = ⟨Jx, y⟩ = y* J x``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return complex(np.vdot(y, K.J @ x))


def j_adjoint(A, domain, codomain=None):
    """``A♯ = J₁ A* J₂`` for ``A`` mapping ``domain`` (J₁) into ``codomain`` (J₂)."""
    codomain = domain if codomain is None else codomain
    A = as_matrix(A)
    if A.shape != (codomain.dim, domain.dim):
        raise DimensionError(
            f"operator of shape {A.shape} does not map dim {domain.dim} into dim {codomain.dim}"
        )
    return domain.J @ A.conj().T @ codomain.J


def _check_operator(A, K, name="operator"):
    A = require_square(A, name)
    if A.shape[0] != K.dim:
        raise DimensionError(f"{name} has dimension {A.shape[0]}, space has {K.dim}")
    return A


def j_selfadjoint_residual(A, K):
    A = _check_operator(A, K)
    return fro(A - j_adjoint(A, K)) / max(1.0, fro(A))


def is_j_selfadjoint(A, K, rtol=SELFADJOINT_RTOL):
    """Return ``(flag, residual)`` with residual ``‖A − A♯‖_F / max(1, ‖A‖_F)``."""
    res = j_selfadjoint_residual(A, K)
    return res <= rtol, res


def is_j_positive(A, K, tol_rel=TOL_REL):
    """Positivity verdict of ``JA``; raises if ``A`` is not J-selfadjoint."""
    A = _check_operator(A, K)
    return psd_verdict(K.J @ A, tol_rel)


def is_j_positive_right(A, K, tol_rel=TOL_REL):
    """Positivity verdict of ``AJ`` (congruent to ``JA`` through ``J``)."""
    A = _check_operator(A, K)
    return psd_verdict(A @ K.J, tol_rel)


@dataclass(frozen=True)
class OrderVerdict:
    relation: str  # "leq" | "geq" | "equal" | "incomparable"
    gap: np.ndarray
    psd: PsdVerdict

    @property
    def holds(self):
        """True when the tested ``A ≤ᴶ B`` is satisfied (``leq`` or ``equal``)."""
        return self.relation in ("leq", "equal")

    def to_dict(self):
        return {"relation": self.relation, "psd": self.psd.to_dict()}


_RELATION = {"positive": "leq", "negative": "geq", "zero": "equal", "indefinite": "incomparable"}


def order_from_gap(gap, tol_rel=TOL_REL):
    """OrderVerdict of ``A ≤ᴶ B`` given the Hermitian gap ``J(B − A)``."""
    v = psd_verdict(gap, tol_rel)
    return OrderVerdict(_RELATION[v.verdict], np.asarray(gap), v)


def j_order_verdict(A, B, K, tol_rel=TOL_REL):
    """Decide ``A ≤ᴶ B`` from the sign of ``J(B − A)``.

    Both arguments must be J-selfadjoint; otherwise the gap is not Hermitian
    and a :class:`NotHermitianError` is raised rather than symmetrising.
    """
    A = _check_operator(A, K, "A")
    B = _check_operator(B, K, "B")
    for name, M in (("A", A), ("B", B)):
        ok, res = is_j_selfadjoint(M, K)
        if not ok:
            raise NotHermitianError(f"{name} is not J-selfadjoint (residual {res:.3e})")
    return order_from_gap(K.J @ (B - A), tol_rel)


def is_j_contraction(C, K, tol_rel=TOL_REL):
    """Positivity verdict of ``J − C*JC``."""
    C = _check_operator(C, K, "C")
    return psd_verdict(K.J - C.conj().T @ K.J @ C, tol_rel)


@dataclass(frozen=True)
class BlockDecomposition:
    C11: np.ndarray
    C12: np.ndarray
    C21: np.ndarray
    C22: np.ndarray
    basis: np.ndarray

    def reassemble(self):
        """The operator back in standard coordinates."""
        T = np.block([[self.C11, self.C12], [self.C21, self.C22]])
        W = self.basis
        return W @ T @ W.conj().T


def block_decompose(C, K):
    """Blocks of ``C`` relative to ``H₊ ⊕ H₋`` in the cached eigenbasis of ``J``."""
    C = _check_operator(C, K, "C")
    W = K.basis
    T = W.conj().T @ C @ W
    p = K.p
    return BlockDecomposition(T[:p, :p], T[:p, p:], T[p:, :p], T[p:, p:], W)


@dataclass(frozen=True)
class BicontractionReport:
    is_bicontraction: bool
    contraction: PsdVerdict
    adjoint_contraction: PsdVerdict
    c11_ratio: float  # σ_min/σ_max of C11, 1.0 when p = 0
    c11_invertible: bool
    c22_ratio: float  # σ_min/σ_max of C22, 1.0 when q = 0
    c22_invertible: bool
    criteria_agree: bool


def is_j_bicontraction(C, K, tol_rel=TOL_REL):
    """Check that ``C`` and ``C♯`` are both J-contractions.

    The verdict comes from testing ``C`` and ``C♯`` directly.  As an
    independent route, a J-contraction is a bicontraction exactly when the
    block ``C₂₂`` acting on ``H₋`` is invertible; ``criteria_agree`` records
    whether both routes concur.  Invertibility of ``C₁₁`` is reported as a
    diagnostic only: it is sufficient but not necessary (``[[0,1],[1,2]]`` on
    2-dimensional Minkowski space is an invertible J-contraction with
    ``C₁₁ = 0``).
    """
    C = _check_operator(C, K, "C")
    direct = is_j_contraction(C, K, tol_rel)
    adjoint = is_j_contraction(j_adjoint(C, K), K, tol_rel)
    blocks = block_decompose(C, K)
    r11 = linalg.singular_value_ratio(blocks.C11)
    r22 = linalg.singular_value_ratio(blocks.C22)
    c11_ok = r11 >= linalg.INVERTIBLE_RTOL
    c22_ok = r22 >= linalg.INVERTIBLE_RTOL
    both = direct.is_positive and adjoint.is_positive
    agree = (both == c22_ok) if direct.is_positive else True
    return BicontractionReport(both, direct, adjoint, r11, c11_ok, r22, c22_ok, agree)


def is_j_unitary(U, K, rtol=1e-9):
    """``(flag, residual)`` with residual ``‖U*JU − J‖_F / max(1, ‖U‖_F²)``."""
    U = _check_operator(U, K, "U")
    res = fro(U.conj().T @ K.J @ U - K.J) / max(1.0, fro(U) ** 2)
    return res <= rtol, res


def is_j_isometry_unitary(C, K, rtol=1e-9):
    """For a J-isometry (``C♯C = I``) confirm ``CC♯ = I``, i.e. ``C♯ = C^{-1}``.

    Returns ``(isometry_residual, coisometry_residual)``.
    """
    C = _check_operator(C, K, "C")
    Cs = j_adjoint(C, K)
    eye = np.eye(K.dim)
    return fro(Cs @ C - eye), fro(C @ Cs - eye)


def jpositive_decompose(A, K, tol_rel=TOL_REL):
    """``Ã = JA`` for invertible J-positive ``A`` so that ``A = JÃ`` with ``Ã > 0``."""
    A = _check_operator(A, K, "A")
    if not linalg.is_invertible(A):
        raise SingularMatrixError("A is singular; only invertible J-positive A factor as JÃ, Ã > 0")
    verdict = is_j_positive(A, K, tol_rel)
    if verdict.verdict != "positive":
        raise HypothesisError(
            f"A is not J-positive (JA is {verdict.verdict})",
            hypothesis="J-positive",
            data=verdict.to_dict(),
        )
    return K.J @ A


# --------------------------------------------------------------------------
# Seeded samplers
# --------------------------------------------------------------------------


def _rng(seed, index, salt):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index), salt]))


def _ginibre(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)


def sample_j_positive(K, seed, index=0, invertible=True):
    """Random ``J G`` with ``G = HH*`` (plus a ridge when ``invertible``).

    Non-invertible samples use a rank-deficient ``H``.
    """
    rng = _rng(seed, index, _SALT_POSITIVE)
    n = K.dim
    if invertible or n == 1:
        H = _ginibre(rng, n, n) / np.sqrt(n)
        G = H @ H.conj().T
        G = G + 0.05 * linalg.opnorm(G) * np.eye(n) + 1e-3 * np.eye(n)
    else:
        k = int(rng.integers(1, n))
        H = _ginibre(rng, n, k) / np.sqrt(n)
        G = H @ H.conj().T
    G = 0.5 * (G + G.conj().T)
    A = K.J @ G
    verdict = is_j_positive(A, K)
    if not verdict.is_positive or (invertible and not linalg.is_invertible(A)):
        raise RuntimeError(f"sampler produced an invalid J-positive matrix: {verdict}")
    return A


def j_unitary_from_generator(S, K):
    """``expm(J S)`` for skew-Hermitian ``S``; J-unitary by construction."""
    S = _check_operator(S, K, "S")
    if fro(S + S.conj().T) > 1e-12 * max(1.0, fro(S)):
        raise ValueError("generator must be skew-Hermitian")
    return linalg.expm(K.J @ S)


def sample_j_unitary(K, seed, index=0, scale=0.5):
    rng = _rng(seed, index, _SALT_UNITARY)
    n = K.dim
    G = _ginibre(rng, n, n)
    S = scale * (G - G.conj().T) / (2.0 * np.sqrt(n))
    U = j_unitary_from_generator(S, K)
    ok, res = is_j_unitary(U, K)
    if not ok:
        raise RuntimeError(f"sampled J-unitary failed verification (residual {res:.3e})")
    return U


def contraction_from_moduli(sigma, K, U1=None, U2=None):
    """``U₁ Σ U₂`` with ``Σ`` diagonal in the J-eigenbasis.

    ``sigma`` lists the diagonal entries (``+1`` block first); a J-contraction
    results when ``|σ| ≤ 1`` on the ``+1`` block and ``|σ| ≥ 1`` on the ``−1``
    block.
    """
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (K.dim,):
        raise DimensionError("need one diagonal entry per dimension")
    W = K.basis
    Sigma = (W * sigma) @ W.conj().T
    eye = np.eye(K.dim, dtype=complex)
    U1 = eye if U1 is None else U1
    U2 = eye if U2 is None else U2
    return U1 @ Sigma @ U2


def sample_invertible_j_contraction(K, seed, index=0, scale=0.5):
    """Random invertible J-contraction ``U₁ Σ U₂``.

    ``|σ|`` is log-uniform in ``[0.1, 1]`` on the ``+1`` block and in
    ``[1, 10]`` on the ``−1`` block, with uniform random phases.
    """
    rng = _rng(seed, index, _SALT_CONTRACTION)
    p, q = K.signature
    mod = np.concatenate([10.0 ** rng.uniform(-1.0, 0.0, p), 10.0 ** rng.uniform(0.0, 1.0, q)])
    phase = np.exp(2j * np.pi * rng.uniform(size=K.dim))
    sub = int(rng.integers(0, 2**31))
    U1 = sample_j_unitary(K, sub, 0, scale)
    U2 = sample_j_unitary(K, sub, 1, scale)
    C = contraction_from_moduli(mod * phase, K, U1, U2)
    verdict = is_j_contraction(C, K)
    if not verdict.is_positive or not linalg.is_invertible(C):
        raise RuntimeError(f"sampler produced an invalid J-contraction: {verdict}")
    return C
