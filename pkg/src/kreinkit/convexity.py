"""Krein-operator convexity and the Jensen-type inequality.

``f`` is Krein-operator convex when

    f((1−λ)A + λB) ≤ᴶ (1−λ) f(A) + λ f(B)

for J-positive ``A``, ``B`` with admissible spectra.  The Jensen-type
statement for such ``f`` with ``f(0) = 0`` is

    f(C♯AC) ≤ᴶ C♯ f(A) C

for J-positive ``A`` and invertible J-contractions ``C``.  This module decides
individual instances, replays the dilation argument behind the Jensen
inequality step by step, and hosts the demonstrations built around ``t²`` and
``1/t``.

Hypothesis checks for the Jensen verdict are the ones the dilation argument
actually uses: ``f`` analytic at 0 with ``f(0) = 0`` and the spectra of
``A``, ``C♯AC``, ``D♯AD`` and ``σ(A) ∪ {0}`` admissible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import funcalc, julia, krein, linalg
from .errors import HypothesisError, KreinError
from .krein import OrderVerdict, j_adjoint, order_from_gap
from .linalg import TOL_REL, fro, match_spectra, spectrum
from .reports import StepReport

ADMISSIBLE_RTOL = 1e-8


@dataclass
class ConvexityInstance:
    f: funcalc.AnalyticFunction
    A: np.ndarray
    B: np.ndarray
    lam: float
    space: krein.KreinSpace


@dataclass
class JensenInstance:
    f: funcalc.AnalyticFunction
    A: np.ndarray
    C: np.ndarray
    space: krein.KreinSpace
    julia: julia.JuliaOperator | None = None

    def julia_operator(self):
        if self.julia is None:
            self.julia = julia.julia_operator(self.C, self.space)
        return self.julia


@dataclass
class SearchResult:
    found: bool
    probes: int
    skipped: int = 0
    instance: ConvexityInstance | None = None
    verdict: OrderVerdict | None = None
    index: int | None = None  # sampler index; None for the canned pair

    @property
    def probe(self):
        """Zero-based position of the failing probe."""
        return self.probes - 1 if self.found else None


def require_admissible(f, eigs, label):
    """Raise :class:`HypothesisError` if an eigenvalue hits an excluded point of ``f``."""
    eigs = np.asarray(eigs, dtype=complex).ravel()
    if not f.excluded_points or eigs.size == 0:
        return
    margin = ADMISSIBLE_RTOL * max(1.0, float(np.max(np.abs(eigs))))
    for lam in eigs:
        if f.distance_to_exclusions(lam) <= margin:
            e = f.nearest_exclusion(lam)
            raise HypothesisError(
                f"σ({label}) meets the excluded point {funcalc._fmt_coef(e)} of {f.name}",
                hypothesis=f"σ({label}) clear of excluded point {funcalc._fmt_coef(e)}",
                data={"eigenvalue": complex(lam), "excluded_point": e},
            )


def require_j_positive(A, K, label, tol_rel=TOL_REL):
    ok, res = krein.is_j_selfadjoint(A, K)
    if not ok:
        raise HypothesisError(f"{label} is not J-selfadjoint (residual {res:.3e})", hypothesis=f"{label} J-positive")
    v = krein.is_j_positive(A, K, tol_rel)
    if not v.is_positive:
        raise HypothesisError(
            f"{label} is not J-positive (J{label} is {v.verdict})",
            hypothesis=f"{label} J-positive",
            data=v.to_dict(),
        )


def require_invertible_contraction(C, K, tol_rel=TOL_REL):
    if not linalg.is_invertible(C):
        raise HypothesisError("C is not invertible", hypothesis="C invertible")
    v = krein.is_j_contraction(C, K, tol_rel)
    if not v.is_positive:
        raise HypothesisError(
            f"C is not a J-contraction (J − C*JC is {v.verdict})",
            hypothesis="C J-contraction",
            data=v.to_dict(),
        )


def require_vanishes_at_zero(f):
    if not f.is_analytic_at(0.0):
        raise HypothesisError(
            f"0 is an excluded point of {f.name}; f(0) = 0 needs f analytic at 0",
            hypothesis="f analytic at 0 (0 ∈ excluded points of f)",
            data={"excluded_point": 0j},
        )
    f0 = complex(f(np.array([0j]))[0])
    if abs(f0) > 1e-14:
        raise HypothesisError(f"{f.name}(0) = {f0:.6g} ≠ 0", hypothesis="f(0) = 0", data={"f(0)": f0})


def _symmetrize_j(M, K):
    """Project onto J-selfadjoint matrices: ``(M + M♯)/2``."""
    return 0.5 * (M + j_adjoint(M, K))


# --------------------------------------------------------------------------
# Verdicts
# --------------------------------------------------------------------------


def convexity_verdict(inst, method="auto", tol_rel=TOL_REL, check=True):
    """Decide ``f((1−λ)A+λB) ≤ᴶ (1−λ)f(A)+λf(B)``.

    The gap ``J[(1−λ)f(A) + λf(B) − f((1−λ)A+λB)]`` is returned inside the
    verdict.  ``check=False`` skips the J-positivity hypotheses (used for the
    J-selfadjoint triviality argument).
    """
    f, A, B, lam, K = inst.f, inst.A, inst.B, float(inst.lam), inst.space
    if not 0.0 <= lam <= 1.0:
        raise ValueError("λ must lie in [0, 1]")
    if not f.real_on_real:
        raise HypothesisError(f"{f.name} is not real on the real axis", hypothesis="f real on real")
    M = (1.0 - lam) * A + lam * B
    if check:
        require_j_positive(A, K, "A", tol_rel)
        require_j_positive(B, K, "B", tol_rel)
    for label, X in (("A", A), ("B", B), ("(1−λ)A+λB", M)):
        require_admissible(f, spectrum(X), label)
    fA = funcalc.matrix_function(f, A, method)
    fB = funcalc.matrix_function(f, B, method)
    fM = funcalc.matrix_function(f, M, method)
    gap = K.J @ ((1.0 - lam) * fA + lam * fB - fM)
    return order_from_gap(0.5 * (gap + gap.conj().T), tol_rel)


def jensen_hypotheses(inst, tol_rel=TOL_REL):
    """Check every hypothesis of the Jensen-type inequality; return the Julia operator."""
    f, A, C, K = inst.f, inst.A, inst.C, inst.space
    require_vanishes_at_zero(f)
    if not f.real_on_real:
        raise HypothesisError(f"{f.name} is not real on the real axis", hypothesis="f real on real")
    require_j_positive(A, K, "A", tol_rel)
    require_invertible_contraction(C, K, tol_rel)
    j = inst.julia_operator()
    Cs = j_adjoint(C, K)
    Ds = j.D.conj().T @ K.J
    sA = spectrum(A)
    require_admissible(f, sA, "A")
    require_admissible(f, np.concatenate([sA, [0j]]), "X = A ⊕ 0")
    require_admissible(f, spectrum(Cs @ A @ C), "C♯AC")
    if j.r1:
        require_admissible(f, spectrum(Ds @ A @ j.D), "D♯AD")
    return j


def jensen_gap(f, A, C, K, method="auto"):
    """``J[C♯f(A)C − f(C♯AC)]`` with no hypothesis checks (diagnostic path)."""
    Cs = j_adjoint(C, K)
    fA = funcalc.matrix_function(f, A, method)
    fT = funcalc.matrix_function(f, Cs @ A @ C, method)
    gap = K.J @ (Cs @ fA @ C - fT)
    return 0.5 * (gap + gap.conj().T)


def jensen_verdict(inst, method="auto", tol_rel=TOL_REL):
    """Decide ``f(C♯AC) ≤ᴶ C♯f(A)C`` after full hypothesis checking."""
    jensen_hypotheses(inst, tol_rel)
    return order_from_gap(jensen_gap(inst.f, inst.A, inst.C, inst.space, method), tol_rel)


def square_transformation_check(A, C, K, tol_rel=TOL_REL):
    """Verdict on ``(C♯AC)² ≤ᴶ C♯A²C``; the gap ``J(C♯A²C − (C♯AC)²)`` is always PSD."""
    require_j_positive(A, K, "A", tol_rel)
    require_invertible_contraction(C, K, tol_rel)
    Cs = j_adjoint(C, K)
    T = Cs @ A @ C
    gap = K.J @ (Cs @ A @ A @ C - T @ T)
    return order_from_gap(0.5 * (gap + gap.conj().T), tol_rel)


# --------------------------------------------------------------------------
# The dilation argument, step by step
# --------------------------------------------------------------------------


def _block_diag_residual(M, top, bottom):
    target = linalg.direct_sum(top, bottom)
    return fro(M - target) / max(1.0, fro(target)) if M.shape == target.shape else np.inf


def jensen_proof_chain(inst, method="auto", tol_rel=TOL_REL, flip_sign=True):
    """Run and certify the seven steps of the dilation argument.

    ``flip_sign=False`` builds ``V`` without the ``I ⊕ −I`` factor, a fault
    injection that must break the midpoint identity.  Every step is executed
    even after a failure so that reports are complete.
    """
    j = jensen_hypotheses(inst, tol_rel)
    f, A, C, K = inst.f, inst.A, inst.C, inst.space
    n, r1, r2 = K.dim, j.r1, j.r2
    K1 = krein.augment(K, r1)
    K2 = krein.augment(K, r2)
    J1, J2 = K1.J, K2.J
    reports = []

    # 1. X = A ⊕ 0 is J̃₂-positive
    X = linalg.direct_sum(A, np.zeros((r2, r2), dtype=complex))
    vX = krein.is_j_positive(X, K2, tol_rel)
    okX, resX = krein.is_j_selfadjoint(X, K2)
    reports.append(
        StepReport("1 X J̃₂-positive", okX and vX.is_positive, vX, vX.tolerance_used, "X = A ⊕ 0_{r2}")
    )

    # 2. U and V = U (I ⊕ −I) are (J̃₁, J̃₂)-unitary
    U = julia.julia_assemble(j, K)
    flip = linalg.direct_sum(np.eye(n, dtype=complex), -np.eye(r1, dtype=complex))
    V = U @ flip if flip_sign else U.copy()
    resU = max(julia.unitarity_residuals(U, J1, J2))
    resV = max(julia.unitarity_residuals(V, J1, J2))
    reports.append(
        StepReport(
            "2 U, V unitary",
            max(resU, resV) <= julia.IDENTITY_TOL,
            max(resU, resV),
            julia.IDENTITY_TOL,
            f"‖U♯U−I‖,‖UU♯−I‖ ≤ {resU:.2e}; V: {resV:.2e}",
        )
    )

    # 3. midpoint identity
    Us = julia.j_adjoint_between(U, J1, J2)
    Vs = julia.j_adjoint_between(V, J1, J2)
    P = _symmetrize_j(Us @ X @ U, K1)
    Q = _symmetrize_j(Vs @ X @ V, K1)
    Cs = j_adjoint(C, K)
    Ds = j.D.conj().T @ K.J
    T = Cs @ A @ C
    S = Ds @ A @ j.D
    res3 = _block_diag_residual((P + Q) / 2, T, S)
    reports.append(
        StepReport(
            "3 midpoint identity",
            res3 <= 1e-9,
            res3,
            1e-9,
            "(U♯XU + V♯XV)/2 = C♯AC ⊕ D♯AD",
        )
    )

    # 4. σ(U♯XU) = σ(V♯XV) = σ(X)
    sX = spectrum(X)
    scale = max(1.0, float(np.max(np.abs(sX))))
    try:
        d4 = max(match_spectra(spectrum(P), sX), match_spectra(spectrum(Q), sX))
    except KreinError as exc:
        d4 = np.inf
        detail4 = str(exc)
    else:
        detail4 = "spectra of U♯XU and V♯XV match σ(A) ∪ {0}"
    reports.append(StepReport("4 spectra preserved", d4 <= 1e-8 * scale, d4, 1e-8 * scale, detail4))

    # 5. midpoint convexity for the pair (U♯XU, V♯XV)
    try:
        v5 = convexity_verdict(ConvexityInstance(f, P, Q, 0.5, K1), method, tol_rel)
        ok5 = v5.holds
        detail5 = f"relation {v5.relation}"
    except KreinError as exc:
        v5, ok5, detail5 = None, False, f"verdict unavailable: {exc}"
    reports.append(
        StepReport(
            "5 midpoint convexity",
            ok5,
            v5.psd if v5 else None,
            v5.psd.tolerance_used if v5 else None,
            detail5,
            {"verdict": v5},
        )
    )

    # 6. covariance f(U♯XU) = U♯ f(X) U (and for V)
    try:
        fX = funcalc.matrix_function(f, X, method)
        fP = funcalc.matrix_function(f, P, method)
        fQ = funcalc.matrix_function(f, Q, method)
        UfU = Us @ fX @ U
        VfV = Vs @ fX @ V
        res6 = max(fro(fP - UfU) / (1.0 + fro(UfU)), fro(fQ - VfV) / (1.0 + fro(VfV)))
        detail6 = "f(U♯XU) = U♯f(X)U and f(V♯XV) = V♯f(X)V"
    except KreinError as exc:
        res6, detail6 = np.inf, f"covariance unavailable: {exc}"
    reports.append(StepReport("6 unitary covariance", res6 <= 1e-8, res6, 1e-8, detail6))

    # 7. projection to the first block gives the Jensen gap
    gap7 = jensen_gap(f, A, C, K, method)
    v7 = order_from_gap(gap7, tol_rel)
    data7 = {"verdict": v7}
    detail7 = f"J[C♯f(A)C − f(C♯AC)]: relation {v7.relation}"
    if v5 is not None:
        block = v5.gap[:n, :n]
        data7["block_residual"] = fro(block - gap7) / max(1.0, fro(gap7))
        detail7 += f"; first block of step-5 gap differs by {data7['block_residual']:.2e}"
    reports.append(StepReport("7 jensen gap", v7.holds, v7.psd, v7.psd.tolerance_used, detail7, data7))
    return reports


# --------------------------------------------------------------------------
# Demonstrations
# --------------------------------------------------------------------------


def scalar_triviality_demo(f, alpha, beta, K, tol_rel=TOL_REL):
    """Midpoint test on ``A = αI``, ``B = βI``: the gap is ``c·J``.

    ``c = (f(α)+f(β))/2 − f((α+β)/2)``.  On a space of mixed signature the
    verdict is ``indefinite`` unless ``c = 0``, so requiring the J-order for
    all J-selfadjoint pairs forces midpoint-affine ``f``.
    """
    if K.p < 1 or K.q < 1:
        raise ValueError("need a space of mixed signature")
    eye = np.eye(K.dim, dtype=complex)
    inst = ConvexityInstance(f, alpha * eye, beta * eye, 0.5, K)
    v = convexity_verdict(inst, check=False, tol_rel=tol_rel)
    vals = f(np.array([alpha, beta, 0.5 * (alpha + beta)], dtype=complex))
    c = complex(0.5 * (vals[0] + vals[1]) - vals[2])
    tol = v.psd.tolerance_used
    expected = "equal" if abs(c) <= tol else "incomparable"
    gap_res = fro(v.gap - c * K.J)
    passed = v.relation == expected and gap_res <= 1e-12 * max(1.0, abs(c))
    return StepReport(
        "scalar triviality",
        passed,
        v.psd,
        tol,
        f"c = {c.real:.17g}; gap = c·J (residual {gap_res:.1e}); relation {v.relation}",
        {"c": c, "verdict": v, "gap_residual": gap_res},
    )


def _zero_value(f):
    if f.is_analytic_at(0.0):
        return complex(f(np.array([0j]))[0])
    if f.value_at_zero is None:
        raise HypothesisError(f"{f.name} has no value at 0", hypothesis="f defined at 0")
    return complex(f.value_at_zero)


def hilbert_embedding_check(f, P, Q, lam, method="auto", tol_rel=TOL_REL):
    """Embed positive definite ``P``, ``Q`` as ``P ⊕ 0``, ``Q ⊕ 0`` in ``(C^{2n}, I ⊕ −I)``.

    Returns ``(embedded verdict, classical verdict)``.  The embedded gap is
    ``classical gap ⊕ 0``, so the Krein verdict reduces to the Loewner-order
    verdict on the positive block.  When 0 is a pole of ``f`` the calculus is
    applied blockwise, with the zero block mapped to the stored ``f(0)``.
    """
    P = linalg.require_square(P, "P")
    Q = linalg.require_square(Q, "Q")
    n = P.shape[0]
    for name, M in (("P", P), ("Q", Q)):
        if linalg.psd_verdict(M, tol_rel).verdict != "positive" or not linalg.is_invertible(M):
            raise HypothesisError(f"{name} is not positive definite", hypothesis=f"{name} > 0")
    K = krein.diagonal_space(n, n)
    Z = np.zeros((n, n), dtype=complex)
    At = linalg.direct_sum(P, Z)
    Bt = linalg.direct_sum(Q, Z)
    M = (1.0 - lam) * P + lam * Q
    classical_gap = (1.0 - lam) * funcalc.matrix_function(f, P, method) + lam * funcalc.matrix_function(
        f, Q, method
    ) - funcalc.matrix_function(f, M, method)
    classical = order_from_gap(0.5 * (classical_gap + classical_gap.conj().T), tol_rel)
    if f.is_analytic_at(0.0):
        embedded = convexity_verdict(ConvexityInstance(f, At, Bt, lam, K), method, tol_rel)
    else:
        f0 = _zero_value(f) * np.eye(n)
        fA = linalg.direct_sum(funcalc.matrix_function(f, P, method), f0)
        fB = linalg.direct_sum(funcalc.matrix_function(f, Q, method), f0)
        fM = linalg.direct_sum(funcalc.matrix_function(f, M, method), f0)
        gap = K.J @ ((1.0 - lam) * fA + lam * fB - fM)
        embedded = order_from_gap(0.5 * (gap + gap.conj().T), tol_rel)
    return embedded, classical


# --------------------------------------------------------------------------
# The t² counterexample and searches
# --------------------------------------------------------------------------

SQUARE_PAIR_A = np.array([[1, -1], [1, -2]], dtype=complex)
SQUARE_PAIR_B = np.array([[1, -1], [1, -3]], dtype=complex)


def square_counterexample():
    """The t² midpoint counterexample on 2-dimensional Minkowski space."""
    return ConvexityInstance(funcalc.parse_function("square"), SQUARE_PAIR_A.copy(), SQUARE_PAIR_B.copy(), 0.5, krein.make_minkowski(2))


def counterexample_search(f, K, budget, seed, method="auto", tol_rel=TOL_REL):
    """Probe seeded invertible J-positive pairs for a midpoint-convexity failure.

    On 2-dimensional Minkowski space the t² counterexample pair is probed
    first.  Pairs whose spectra are inadmissible for ``f`` are skipped and
    counted, not reported as failures.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    probes = skipped = 0
    candidates = []
    if K.is_minkowski() and K.dim == 2:
        candidates.append((None, SQUARE_PAIR_A, SQUARE_PAIR_B))
    i = 0
    while probes < budget:
        if candidates:
            idx, A, B = candidates.pop(0)
        else:
            idx = i
            A = krein.sample_j_positive(K, seed, 2 * i, invertible=True)
            B = krein.sample_j_positive(K, seed, 2 * i + 1, invertible=True)
            i += 1
        probes += 1
        inst = ConvexityInstance(f, A, B, 0.5, K)
        try:
            v = convexity_verdict(inst, method, tol_rel)
        except HypothesisError:
            skipped += 1
            continue
        if not v.holds:
            return SearchResult(True, probes, skipped, inst, v, idx)
    return SearchResult(False, probes, skipped)


def rank_one_pair(K, seed, index):
    """Invertible J-positive ``A`` and ``B = A + J vv*``; ``J(B − A)`` has rank one."""
    A = krein.sample_j_positive(K, seed, index, invertible=True)
    rng = krein._rng(seed, index, 0x5231)
    v = krein._ginibre(rng, K.dim, 1)
    B = A + K.J @ (v @ v.conj().T)
    return A, B
