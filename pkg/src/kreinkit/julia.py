"""Defect operators and Julia operators of invertible J-contractions.

For an invertible J-contraction ``C`` on ``(C^n, J)`` the Julia operator is

    U = [[C,  D  ],
         [E♯, −L*]]  : (C^n ⊕ C^{r1}) → (C^n ⊕ C^{r2})

with Hilbert defect spaces, i.e. fundamental symmetries ``J ⊕ I_{r1}`` and
``J ⊕ I_{r2}``.  ``E`` (``n × r2``) and ``D`` (``n × r1``) are full-column-rank
factors of the defect grams; the link ``L`` (``r2 × r1``) is recovered from
``C♯D = EL*``.  The gauge of ``E`` and ``D`` is the one fixed by
:func:`kreinkit.linalg.psd_factor` (columns by descending gram eigenvalue).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import CertificateError, DimensionError, HypothesisError, SingularMatrixError
from .krein import is_j_contraction, j_adjoint
from .linalg import RANK_TOL, TOL_REL, fro, opnorm, pinv, psd_factor, psd_verdict
from .reports import StepReport

IDENTITY_TOL = 1e-9

IDENTITY_NAMES = (
    "C♯C+EE♯=I",
    "C♯D=EL*",
    "D♯D+LL*=I",
    "CC♯+DD♯=I",
    "CE=DL",
    "E♯E+L*L=I",
)


@dataclass(frozen=True)
class DefectPair:
    operator: np.ndarray
    gram: np.ndarray
    rank: int


@dataclass
class JuliaOperator:
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    L: np.ndarray
    r1: int
    r2: int
    residuals: dict = field(default_factory=dict)

    @property
    def link_norm(self):
        """``‖L‖₂``; reported as a diagnostic, not required to be ≤ 1."""
        return opnorm(self.L)


def defect_for(C, K, side="right", rank_tol=RANK_TOL, tol_rel=TOL_REL):
    """Defect operator of ``C`` (``side="right"``) or of ``C♯`` (``side="left"``).

    The right defect ``E`` factors ``(I − C♯C)J = EE*``, so that
    ``I − C♯C = EE♯`` with ``E♯ = E*J``; the left defect ``D`` factors
    ``(I − CC♯)J``.  A gram that is not positive semidefinite means ``C`` is
    not a J-contraction on that side.
    """
    C = linalg.require_square(C, "C")
    if C.shape[0] != K.dim:
        raise DimensionError(f"C has dimension {C.shape[0]}, space has {K.dim}")
    eye = np.eye(K.dim)
    Cs = j_adjoint(C, K)
    if side == "right":
        defect = eye - Cs @ C
    elif side == "left":
        defect = eye - C @ Cs
    else:
        raise ValueError("side must be 'right' or 'left'")
    gram = defect @ K.J
    gram = 0.5 * (gram + gram.conj().T)
    verdict = psd_verdict(gram, tol_rel)
    if not verdict.is_positive:
        who = "C" if side == "right" else "C♯"
        raise HypothesisError(
            f"{who} is not a J-contraction: defect gram is {verdict.verdict}",
            hypothesis="J-contraction",
            data=verdict.to_dict(),
        )
    F = psd_factor(gram, rank_tol, tol_rel, scale=max(1.0, opnorm(C) ** 2))
    return DefectPair(F, gram, F.shape[1])


def _identities(C, D, E, L, K):
    J = K.J
    n = K.dim
    Cs = j_adjoint(C, K)
    Es = E.conj().T @ J  # E: C^{r2} (Hilbert) → (C^n, J)
    Ds = D.conj().T @ J
    Ls = L.conj().T
    eye_n = np.eye(n)
    eye_1 = np.eye(D.shape[1])
    eye_2 = np.eye(E.shape[1])
    return {
        "C♯C+EE♯=I": fro(Cs @ C + E @ Es - eye_n),
        "C♯D=EL*": fro(Cs @ D - E @ Ls),
        "D♯D+LL*=I": fro(Ds @ D + L @ Ls - eye_1),
        "CC♯+DD♯=I": fro(C @ Cs + D @ Ds - eye_n),
        "CE=DL": fro(C @ E - D @ L),
        "E♯E+L*L=I": fro(Es @ E + Ls @ L - eye_2),
    }


def julia_operator(C, K, rank_tol=RANK_TOL, tol=IDENTITY_TOL):
    """Construct and certify the Julia operator of an invertible J-contraction.

    Raises :class:`CertificateError` naming every identity whose Frobenius
    residual exceeds ``tol``; nothing is repaired after the fact.
    """
    C = linalg.require_square(C, "C")
    if not linalg.is_invertible(C):
        raise SingularMatrixError("the Julia construction here needs an invertible C")
    verdict = is_j_contraction(C, K)
    if not verdict.is_positive:
        raise HypothesisError(
            f"C is not a J-contraction (J − C*JC is {verdict.verdict})",
            hypothesis="J-contraction",
            data=verdict.to_dict(),
        )
    E = defect_for(C, K, "right", rank_tol).operator
    D = defect_for(C, K, "left", rank_tol).operator
    CsD = j_adjoint(C, K) @ D
    Ls = pinv(E, rank_tol) @ CsD
    link_res = fro(E @ Ls - CsD)
    if link_res > 1e-9 * max(fro(CsD), 1.0):
        raise CertificateError(
            f"C♯D is not in the range of E (residual {link_res:.3e})",
            failed=["C♯D=EL*"],
            residuals={"link": link_res},
        )
    L = Ls.conj().T
    residuals = _identities(C, D, E, L, K)
    failed = [k for k in IDENTITY_NAMES if residuals[k] > tol]
    if failed:
        raise CertificateError(
            "Julia certificate failed: " + ", ".join(f"{k} ({residuals[k]:.3e})" for k in failed),
            failed=failed,
            residuals=residuals,
        )
    residuals["link"] = link_res
    return JuliaOperator(C, D, E, L, D.shape[1], E.shape[1], residuals)


def augmented_symmetries(K, r1, r2):
    """``(J ⊕ I_{r1}, J ⊕ I_{r2})``."""
    return (
        linalg.direct_sum(K.J, np.eye(r1, dtype=complex)),
        linalg.direct_sum(K.J, np.eye(r2, dtype=complex)),
    )


def julia_assemble(j, K):
    """The block matrix ``[[C, D], [E♯, −L*]]`` of shape ``(n + r2) × (n + r1)``."""
    n = K.dim
    if j.C.shape != (n, n) or j.D.shape != (n, j.r1) or j.E.shape != (n, j.r2):
        raise DimensionError("Julia blocks do not fit the space")
    if j.L.shape != (j.r2, j.r1):
        raise DimensionError(f"link has shape {j.L.shape}, expected {(j.r2, j.r1)}")
    Es = j.E.conj().T @ K.J
    return np.block([[j.C, j.D], [Es, -j.L.conj().T]])


def j_adjoint_between(U, J1, J2):
    """``U♯ = J₁ U* J₂`` for ``U`` mapping the ``J₁`` space into the ``J₂`` space."""
    return J1 @ U.conj().T @ J2


def unitarity_residuals(U, J1, J2):
    """``(‖U♯U − I‖_F, ‖UU♯ − I‖_F)``."""
    Us = j_adjoint_between(U, J1, J2)
    return fro(Us @ U - np.eye(U.shape[1])), fro(U @ Us - np.eye(U.shape[0]))


def verify_julia(U, K, r1, r2, tol=IDENTITY_TOL):
    """Certify ``U`` as a ``(J ⊕ I_{r1}, J ⊕ I_{r2})``-unitary and name failing block identities."""
    n = K.dim
    if U.shape != (n + r2, n + r1):
        raise DimensionError(f"U has shape {U.shape}, expected {(n + r2, n + r1)}")
    J1, J2 = augmented_symmetries(K, r1, r2)
    left, right = unitarity_residuals(U, J1, J2)
    C = U[:n, :n]
    D = U[:n, n:]
    E = (U[n:, :n] @ K.J).conj().T  # bottom-left block is E♯ = E*J
    L = -U[n:, n:].conj().T
    residuals = _identities(C, D, E, L, K)
    failed = [k for k in IDENTITY_NAMES if residuals[k] > tol]
    passed = left <= tol and right <= tol and not failed
    details = "U♯U = I and UU♯ = I" if passed else "failed: " + ", ".join(failed or ["unitarity"])
    return StepReport(
        "julia unitarity",
        passed,
        max(left, right),
        tol,
        details,
        {"U#U-I": left, "UU#-I": right, "identities": residuals, "failed": failed},
    )
