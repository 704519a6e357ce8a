"""Acceptance criteria at full size and stated tolerances.

Each test prints one ``PASS``/``FAIL`` line; run with ``pytest tests/test_acceptance.py -s``
or read the lines from the captured terminal output.
"""

import time

import numpy as np
import pytest

from kreinkit import convexity as cvx
from kreinkit import funcalc, julia, repro
from kreinkit.errors import HypothesisError
from kreinkit.linalg import fro
from kreinkit.reports import first_failure

SEED = repro.DEFAULT_SEED
J0 = repro.J0
C0 = repro.CANONICAL_C
SQUARE = funcalc.parse_function("square")


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {detail} ({elapsed:.2f} s)")
        assert ok, detail

    return emit


def test_criterion_1_square_midpoint_gap(report):
    t = time.perf_counter()
    v = cvx.convexity_verdict(cvx.square_counterexample())
    err = float(np.max(np.abs(v.gap - np.array([[0, 0], [0, -0.25]]))))
    elapsed = time.perf_counter() - t
    ok = err <= 1e-12 and v.relation not in ("leq", "equal") and elapsed < 1.0
    report(1, "t² midpoint gap", ok, f"max entry error {err:.1e}, relation {v.relation}", elapsed)


def test_criterion_2_square_transformation_batch(report):
    t = time.perf_counter()
    recs = repro.square_transformation_batch(1000, SEED)
    elapsed = time.perf_counter() - t
    bad = [r.index for r in recs if not r.within(1e-8)]
    dims = sorted({r.dim for r in recs})
    ok = len(recs) == 1000 and not bad and dims == [2, 3, 4, 5, 6] and elapsed < 60
    worst = min(r.margin for r in recs)
    report(2, "J(C♯A²C − (C♯AC)²) ⪰ 0", ok, f"{len(recs)} instances, {len(bad)} failures, worst λ_min/‖gap‖ {worst:.1e}", elapsed)


def test_criterion_3_inverse_convexity_batch(report):
    t = time.perf_counter()
    recs = repro.inverse_convexity_batch(1000, SEED, lambdas=(0.25, 0.5, 0.75))
    elapsed = time.perf_counter() - t
    bad = [(r.index, r.lam) for r in recs if r.relation != "leq" or not r.within(1e-8)]
    ok = len(recs) == 3000 and not bad and elapsed < 60
    worst = min(r.margin for r in recs)
    report(3, "inverse convexity verdict leq", ok, f"1000 pairs × 3 λ, {len(bad)} failures, worst margin {worst:.1e}", elapsed)


def test_criterion_4_julia_certification(report):
    t = time.perf_counter()
    recs = repro.julia_batch(500, SEED)
    worst = max(r.worst for r in recs)
    j = julia.julia_operator(C0, J0)
    target = np.diag([np.sqrt(3) / 2, np.sqrt(3)])
    W = np.linalg.solve(target, j.E)  # gauge relating the stored factor to the diagonal one
    V = np.linalg.solve(target, j.D)
    gauge_ok = (
        fro(W.conj().T @ W - np.eye(2)) <= 1e-12
        and fro(V.conj().T @ V - np.eye(2)) <= 1e-12
        and fro(j.L.conj().T - W.conj().T @ np.diag([0.5, 2.0]) @ V) <= 1e-12
    )
    elapsed = time.perf_counter() - t
    ok = len(recs) == 500 and worst <= 1e-9 and gauge_ok and abs(j.link_norm - 2) <= 1e-12
    report(4, "Julia identities", ok, f"500 instances, worst residual {worst:.1e}; canonical gauge {gauge_ok}, ‖L‖ = {j.link_norm:.15g}", elapsed)


def test_criterion_5_functional_calculus(report):
    t = time.perf_counter()
    recs = repro.funcalc_batch(500, SEED)
    route = max(r.route_gap for r in recs)
    horner = max(r.horner_gap for r in recs if r.horner_gap is not None)
    N = np.array([[1, 1], [-1, -1]], dtype=complex)
    nil = float(np.max(np.abs(funcalc.calculus_contour(funcalc.exponential(), N).value - (np.eye(2) + N))))
    elapsed = time.perf_counter() - t
    ok = len(recs) == 500 and route <= 1e-8 and horner <= 1e-9 and nil <= 1e-10
    report(5, "contour vs spectral", ok, f"route gap {route:.1e}, Horner gap {horner:.1e}, nilpotent exp error {nil:.1e}", elapsed)


def test_criterion_6_structure_suites(report):
    t = time.perf_counter()
    p21 = repro.selfadjoint_calculus_batch(500, SEED)
    l26 = repro.covariance_batch(500, SEED)
    # both bounds have the form rtol·(1 + ‖f(A)‖_F); rescale to the 1e−8 criterion
    rel21 = max(r.residual_or_verdict / r.tolerance * 1e-9 for r in p21)
    rel26 = max(r.residual_or_verdict / r.tolerance * 1e-8 for r in l26)
    spec = max(r.data["spectrum_distance"] / r.data["spectrum_bound"] * 1e-8 for r in l26)
    elapsed = time.perf_counter() - t
    ok = len(p21) == len(l26) == 500 and rel21 <= 1e-8 and rel26 <= 1e-8 and spec <= 1e-8
    report(6, "J-selfadjoint calculus and J-unitary covariance", ok,
           f"relative residuals {rel21:.1e} / {rel26:.1e}, relative spectrum distance {spec:.1e}", elapsed)


def test_criterion_7_proof_chain(report):
    t = time.perf_counter()
    lin = cvx.jensen_proof_chain(cvx.JensenInstance(funcalc.parse_function("poly:0,2"), J0.J, C0, J0))
    lin_ok = all(r.passed for r in lin) and all(
        r.data["verdict"].relation == "equal" for r in lin if r.data.get("verdict") is not None
    )
    sq = cvx.jensen_proof_chain(cvx.JensenInstance(SQUARE, J0.J, C0, J0))
    status = {r.step_name[0]: r.passed for r in sq}
    sq_ok = all(status[k] for k in "12346") and not status["5"]
    elapsed = time.perf_counter() - t
    report(7, "proof chain", lin_ok and sq_ok, f"linear all pass {lin_ok}; t² first failure {first_failure(sq)!r}", elapsed)


def test_criterion_8_scalar_triviality(report):
    t = time.perf_counter()
    r = cvx.scalar_triviality_demo(SQUARE, 1.0, 3.0, J0)
    c = r.data["c"]
    zero = [cvx.scalar_triviality_demo(f, a, b, J0) for f, a, b in ((SQUARE, 2.0, 2.0), (funcalc.parse_function("poly:1,-3"), 1.0, 3.0))]
    elapsed = time.perf_counter() - t
    ok = (
        abs(c - 1) <= 1e-12
        and fro(r.data["verdict"].gap - c * J0.J) <= 1e-12
        and r.residual_or_verdict.verdict == "indefinite"
        and all(z.data["verdict"].relation == "equal" for z in zero)
    )
    report(8, "scalar triviality", ok, f"c = {c.real:.17g}, verdict {r.residual_or_verdict.verdict}", elapsed)


def test_criterion_9_inverse_guard(report):
    t = time.perf_counter()
    inst = cvx.JensenInstance(funcalc.inverse(), J0.J, C0, J0)
    named = False
    try:
        cvx.jensen_verdict(inst)
    except HypothesisError as exc:
        named = "0 ∈ excluded points of f" in exc.hypothesis and exc.data["excluded_point"] == 0
    raw = cvx.jensen_gap(funcalc.inverse(), J0.J, C0, J0)
    err = float(np.max(np.abs(raw - np.diag([-15 / 4, 15 / 4]))))
    elapsed = time.perf_counter() - t
    report(9, "inverse hypothesis guard", named and err <= 1e-12, f"names excluded point 0: {named}; raw gap error {err:.1e}", elapsed)
