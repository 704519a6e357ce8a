"""Dense complex linear algebra kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single entry point that validates shape and finiteness.  Everything in
this module is a pure function of its inputs.

Default tolerances
------------------
``TOL_REL = 1e-9``
    relative tolerance of positivity verdicts (:func:`psd_verdict`).
``RANK_TOL = 1e-10``
    relative eigenvalue cut-off of :func:`psd_factor` and :func:`pinv`.
``INVERTIBLE_RTOL = 1e-8``
    a square matrix counts as invertible when its smallest singular value is
    at least this fraction of its largest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    HypothesisError,
    InconclusiveError,
    NotHermitianError,
    SingularMatrixError,
)

TOL_REL = 1e-9
RANK_TOL = 1e-10
INVERTIBLE_RTOL = 1e-8
HERMITIAN_RTOL = 1e-9

_JACOBI_MAX_SWEEPS = 100


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite two-dimensional complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def require_square(M, name="matrix"):
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def fro(M):
    return float(np.linalg.norm(M, "fro")) if np.size(M) else 0.0


def opnorm(M):
    """Spectral norm (largest singular value); 0 for empty matrices."""
    if np.size(M) == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermitian_residual(M):
    """``‖M − M*‖_F / max(1, ‖M‖_F)``."""
    M = np.asarray(M)
    return fro(M - M.conj().T) / max(1.0, fro(M))


def _require_hermitian(M, name="matrix"):
    A = require_square(M, name)
    res = hermitian_residual(A)
    if res > HERMITIAN_RTOL:
        raise NotHermitianError(
            f"{name} is not Hermitian: relative residual {res:.3e} > {HERMITIAN_RTOL:g}"
        )
    return 0.5 * (A + A.conj().T)


# --------------------------------------------------------------------------
# Hermitian eigendecomposition: cyclic Jacobi
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are orthonormal eigenvectors

    def reconstruct(self):
        V = self.vectors
        return (V * self.eigenvalues) @ V.conj().T


def _jacobi(A):
    """Cyclic complex Jacobi on a Hermitian copy ``A``; returns (w, V)."""
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    if n == 1:
        return A.real.diagonal().copy(), V
    scale = fro(A)
    if scale == 0.0:
        return np.zeros(n), V
    eps = np.finfo(float).eps
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * sum(abs(A[p, q]) ** 2 for p, q in pairs))
        if off <= eps * scale:
            return A.diagonal().real.copy(), V
        for p, q in pairs:
            apq = A[p, q]
            mag = abs(apq)
            if mag <= 1e-3 * eps * scale:
                continue
            phase = apq / mag
            app = A[p, p].real
            aqq = A[q, q].real
            theta = (aqq - app) / (2.0 * mag)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] zeroes A[p, q]
            g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
            idx = [p, q]
            A[:, idx] = A[:, idx] @ g
            A[idx, :] = g.conj().T @ A[idx, :]
            A[p, q] = A[q, p] = 0.0
            A[p, p] = A[p, p].real
            A[q, q] = A[q, q].real
            V[:, idx] = V[:, idx] @ g
    raise ConvergenceError(f"Jacobi did not converge in {_JACOBI_MAX_SWEEPS} sweeps")


def hermitian_eig(M):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is checked to be Hermitian to a relative Frobenius residual of
    ``1e-9`` and then symmetrised.  Eigenvalues are returned ascending, with
    the eigenvector columns permuted to match.
    """
    A = _require_hermitian(M)
    w, V = _jacobi(A.copy())
    order = np.argsort(w, kind="stable")
    return HermitianEigenSystem(w[order], V[:, order])


# --------------------------------------------------------------------------
# Positivity verdicts and factorization
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PsdVerdict:
    verdict: str  # "positive" | "negative" | "zero" | "indefinite"
    min_eigenvalue: float
    max_eigenvalue: float
    tolerance_used: float

    @property
    def is_positive(self):
        """``M ⪰ 0`` within tolerance (includes the zero verdict)."""
        return self.verdict in ("positive", "zero")

    @property
    def is_negative(self):
        return self.verdict in ("negative", "zero")

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "tolerance_used": self.tolerance_used,
        }


def classify(min_eig, max_eig, tol):
    pos = min_eig >= -tol
    neg = max_eig <= tol
    if pos and neg:
        return "zero"
    if pos:
        return "positive"
    if neg:
        return "negative"
    return "indefinite"


def psd_verdict(M, tol_rel=TOL_REL):
    """Decide the sign of a Hermitian matrix.

    ``tolerance_used = tol_rel * max(1, ‖M‖₂)``; ``positive`` means every
    eigenvalue is ``≥ -tolerance_used``, ``negative`` means every eigenvalue is
    ``≤ tolerance_used``, ``zero`` is both and ``indefinite`` neither.
    """
    w = hermitian_eig(M).eigenvalues
    if w.size == 0:
        return PsdVerdict("zero", 0.0, 0.0, float(tol_rel))
    lo, hi = float(w[0]), float(w[-1])
    tol = float(tol_rel) * max(1.0, abs(lo), abs(hi))
    return PsdVerdict(classify(lo, hi, tol), lo, hi, tol)


def psd_factor(M, rank_tol=RANK_TOL, tol_rel=TOL_REL, scale=0.0):
    """Full-column-rank ``F`` with ``F F* = M`` for positive semidefinite ``M``.

    The rank is the number of eigenvalues above ``rank_tol * max(λ_max,
    scale)``; pass the magnitude of the terms ``M`` was computed from as
    ``scale`` so that pure rounding noise counts as rank zero.  Columns
    are ``sqrt(λ_k) v_k`` in order of descending eigenvalue, which fixes the
    right-unitary gauge of the factor.
    """
    verdict = psd_verdict(M, tol_rel)
    if not verdict.is_positive:
        raise HypothesisError(
            f"matrix is {verdict.verdict}, cannot factor as F F*",
            hypothesis="positive semidefinite",
            data=verdict.to_dict(),
        )
    es = hermitian_eig(M)
    w, V = es.eigenvalues[::-1], es.vectors[:, ::-1]
    n = w.size
    lam_max = float(w[0]) if n else 0.0
    if lam_max <= 0.0:
        return np.zeros((n, 0), dtype=complex)
    keep = w > rank_tol * max(lam_max, float(scale))
    return V[:, keep] * np.sqrt(w[keep])


# --------------------------------------------------------------------------
# General spectra
# --------------------------------------------------------------------------


def _canonical_order(w):
    # compare on a grid slightly coarser than rounding so conjugate pairs and
    # numerically equal real parts sort deterministically by imaginary part
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    q = 1e-12 * scale
    return np.lexsort((np.round(w.imag / q), np.round(w.real / q)))


def spectrum(A, residual_rtol=1e-8):
    """Eigenvalues of a square matrix, ordered by (real, imag).

    Backed by LAPACK's Hessenberg/shifted-QR driver.  Every eigenpair is
    checked: ``‖Av − λv‖ ≤ residual_rtol·‖A‖`` for the returned unit ``v``;
    otherwise :class:`InconclusiveError` is raised.
    """
    A = require_square(A)
    if A.shape[0] > 32:
        raise DimensionError("spectrum() is limited to dimension 32")
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise InconclusiveError(f"eigenvalue iteration failed: {exc}") from exc
    V = V / np.linalg.norm(V, axis=0)
    res = np.linalg.norm(A @ V - V * w, axis=0)
    bound = residual_rtol * max(opnorm(A), np.finfo(float).tiny)
    if np.any(res > bound):
        raise InconclusiveError(
            f"eigenpair residual {res.max():.3e} exceeds {bound:.3e}"
        )
    return w[_canonical_order(w)]


def match_spectra(a, b):
    """Largest distance under the best one-to-one pairing of two multisets."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return math.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --------------------------------------------------------------------------
# Solves, inverses, pseudo-inverse, exponential
# --------------------------------------------------------------------------


def singular_value_ratio(A):
    """``σ_min / σ_max`` (1 for empty, 0 for the zero matrix)."""
    if np.size(A) == 0:
        return 1.0
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def is_invertible(A, rtol=INVERTIBLE_RTOL):
    A = require_square(A)
    return singular_value_ratio(A) >= rtol


def solve(A, B, rtol=INVERTIBLE_RTOL):
    """Solve ``A X = B`` for square nonsingular ``A``."""
    A = require_square(A)
    B = as_matrix(B, "right-hand side")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"cannot solve {A.shape} against {B.shape}")
    ratio = singular_value_ratio(A)
    if ratio < rtol:
        raise SingularMatrixError(f"matrix is singular: σ_min/σ_max = {ratio:.3e}")
    return np.linalg.solve(A, B)


def inverse(A, rtol=INVERTIBLE_RTOL):
    A = require_square(A)
    return solve(A, np.eye(A.shape[0], dtype=complex), rtol)


def pinv(A, rank_tol=RANK_TOL):
    """Moore-Penrose pseudo-inverse; singular values below ``rank_tol·σ_max`` are dropped."""
    A = as_matrix(A)
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m), dtype=complex)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    keep = s > rank_tol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def expm(A):
    """Matrix exponential by scaling and squaring with a Taylor core.

    ``A`` is scaled by ``2^-s`` so that its 1-norm is at most 0.5, the Taylor
    series is summed until the next term is below machine precision relative
    to the partial sum, and the result is squared ``s`` times.
    """
    A = require_square(A)
    n = A.shape[0]
    norm1 = float(np.abs(A).sum(axis=0).max()) if n else 0.0
    s = max(0, math.ceil(math.log2(norm1 / 0.5))) if norm1 > 0.5 else 0
    X = A / (2.0**s)
    eps = np.finfo(float).eps
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ X / k
        result = result + term
        if np.abs(term).max() <= eps * np.abs(result).max():
            break
    for _ in range(s):
        result = result @ result
    return result


def direct_sum(*blocks):
    """Block-diagonal matrix from square or rectangular blocks."""
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out
