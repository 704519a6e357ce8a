"""Command-line front end.

Exit codes: 0 pass, 1 internal error or failed reproduction check,
2 hypothesis violation, 3 numerically inconclusive, 64 malformed input file,
65 dimension mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import convexity as cvx
from . import funcalc, io, julia, krein, linalg, repro
from .errors import DimensionError, HypothesisError, InconclusiveError, KreinError, NotHermitianError, SingularMatrixError

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_HYPOTHESIS = 2
EXIT_INCONCLUSIVE = 3
EXIT_MALFORMED = 64
EXIT_DIMENSION = 65

ENV_TOL = "KREINKIT_TOL"


class InputError(ValueError):
    """Unusable command-line input other than a matrix file (exit 64)."""


def exit_code_for(exc):
    if isinstance(exc, (io.MatrixFileError, InputError, json.JSONDecodeError, FileNotFoundError)):
        return EXIT_MALFORMED
    if isinstance(exc, DimensionError):
        return EXIT_DIMENSION
    if isinstance(exc, (HypothesisError, SingularMatrixError, NotHermitianError)):
        return EXIT_HYPOTHESIS
    if isinstance(exc, InconclusiveError):
        return EXIT_INCONCLUSIVE
    return EXIT_INTERNAL


def _tolerance(args):
    if args.tol is not None:
        return args.tol
    env = os.environ.get(ENV_TOL)
    return float(env) if env else linalg.TOL_REL


def _tolerances(tol):
    return {"tol_rel": tol, "rank_tol": linalg.RANK_TOL, "contour_rtol": funcalc.CONTOUR_RTOL}


def _function(spec):
    try:
        return funcalc.parse_function(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _space(args, dim=None):
    if getattr(args, "J", None):
        J = io.read_matrix(args.J)
        if J.shape[0] != J.shape[1]:
            raise DimensionError(f"J has shape {J.shape}")
        try:
            return krein.KreinSpace(J)
        except DimensionError:
            raise
        except ValueError as exc:
            raise InputError(f"{args.J}: {exc}") from exc
    n = getattr(args, "minkowski", None) or dim
    if n is None:
        raise DimensionError("need --J or --minkowski")
    return krein.make_minkowski(n)


def _error_record(exc):
    rec = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, HypothesisError) and exc.hypothesis:
        rec["hypothesis"] = exc.hypothesis
    return rec


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_repro(args, argv):
    tol = _tolerance(args)
    ctx = repro.CheckContext(seed=args.seed, tol_rel=tol, batch=args.batch)
    checks = repro.run_checks(ctx, args.only)
    extra = {}
    if args.figures:
        from . import plotting

        extra["figures"] = [os.path.basename(p) for p in plotting.repro_figures(ctx, args.figures)]
    report = io.run_report(argv, args.seed, _tolerances(tol), checks, extra)
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        report["failed_checks"] = failed
    return (EXIT_OK if not failed else EXIT_INTERNAL), report


def cmd_verify_jensen(args, argv):
    tol = _tolerance(args)
    f = _function(args.f)
    A = io.read_matrix(args.A) if args.A else None
    C = io.read_matrix(args.C) if args.C else None
    dim = A.shape[0] if A is not None else (C.shape[0] if C is not None else None)
    K = _space(args, dim)
    if A is None:
        A = krein.sample_j_positive(K, args.seed, 0)
    if C is None:
        C = krein.sample_invertible_j_contraction(K, args.seed, 0)
    for name, M in (("A", A), ("C", C)):
        if M.shape != (K.dim, K.dim):
            raise DimensionError(f"{name} has shape {M.shape}, space has dimension {K.dim}")
    inst = cvx.JensenInstance(f, A, C, K)
    checks = []
    try:
        v = cvx.jensen_verdict(inst, tol_rel=tol)
    except HypothesisError as exc:
        rec = {"name": "jensen", "passed": False, **_error_record(exc)}
        rec["raw_gap"] = _raw_gap_or_none(f, A, C, K)
        report = io.run_report(argv, args.seed, _tolerances(tol), [rec])
        return EXIT_HYPOTHESIS, report
    rec = {
        "name": "jensen",
        "passed": v.holds,
        "relation": v.relation,
        "psd": v.psd.to_dict(),
        "gap": io.format_matrix(v.gap),
    }
    if not v.holds:
        rec["message"] = (
            f"f(C♯AC) ≤ᴶ C♯f(A)C fails with every checkable hypothesis satisfied, "
            f"so {f.name} is not Krein-operator convex"
        )
    checks.append(rec)
    if args.chain:
        for r in cvx.jensen_proof_chain(inst, tol_rel=tol):
            checks.append({"name": "chain " + r.step_name, "passed": r.passed, "details": r.details})
        # the chain is diagnostic; its step-5 outcome does not change the verdict
        for c in checks[1:]:
            c["diagnostic"] = True
    report = io.run_report(argv, args.seed, _tolerances(tol), checks)
    report["passed"] = rec["passed"]
    return (EXIT_OK if v.holds else EXIT_HYPOTHESIS), report


def _raw_gap_or_none(f, A, C, K):
    try:
        return io.format_matrix(cvx.jensen_gap(f, A, C, K))
    except KreinError:
        return None


def cmd_search(args, argv):
    tol = _tolerance(args)
    f = _function(args.f)
    K = _space(args, args.dim)
    res = cvx.counterexample_search(f, K, args.budget, args.seed, tol_rel=tol)
    rec = {"name": "search", "passed": True, "found": res.found, "probes": res.probes, "skipped": res.skipped}
    if res.found:
        rec["probe"] = res.probe
        rec["sample_index"] = res.index
        rec["relation"] = res.verdict.relation
        rec["A"] = io.matrix_to_json(res.instance.A)
        rec["B"] = io.matrix_to_json(res.instance.B)
        rec["gap"] = io.format_matrix(res.verdict.gap)
        rec["psd"] = res.verdict.psd.to_dict()
    return EXIT_OK, io.run_report(argv, args.seed, _tolerances(tol), [rec])


def cmd_funcalc(args, argv):
    f = _function(args.f)
    A = linalg.require_square(io.read_matrix(args.A), "A")
    methods = ["contour", "spectral"] if args.method == "both" else [args.method]
    records, values, errors = [], {}, []
    for m in methods:
        try:
            r = funcalc.calculus(f, A, m)
        except KreinError as exc:
            errors.append(exc)
            records.append({"name": m, "passed": False, **_error_record(exc)})
            continue
        values[m] = r.value
        rec = {"name": m, "passed": True, "value": io.matrix_to_json(r.value), "residual": r.residual}
        if m == "contour":
            rec["nodes"] = r.nodes
        records.append(rec)
    extra = {}
    if len(values) == 2:
        extra["agreement"] = linalg.fro(values["contour"] - values["spectral"]) / (1 + linalg.fro(values["spectral"]))
    report = io.run_report(argv, None, _tolerances(_tolerance(args)), records, extra)
    report["passed"] = bool(values)
    if values:
        return EXIT_OK, report
    return exit_code_for(errors[0]), report


def cmd_julia(args, argv):
    C = io.read_matrix(args.C)
    K = _space(args, C.shape[0])
    if C.shape != (K.dim, K.dim):
        raise DimensionError(f"C has shape {C.shape}, space has dimension {K.dim}")
    j = julia.julia_operator(C, K)
    U = julia.julia_assemble(j, K)
    ver = julia.verify_julia(U, K, j.r1, j.r2)
    rec = {
        "name": "julia",
        "passed": ver.passed,
        "r1": j.r1,
        "r2": j.r2,
        "D": io.format_matrix(j.D),
        "E": io.format_matrix(j.E),
        "L": io.format_matrix(j.L),
        "residuals": j.residuals,
        "unitarity": {"U#U-I": ver.data["U#U-I"], "UU#-I": ver.data["UU#-I"]},
        "link_norm": j.link_norm,
        "link_is_contraction": j.link_norm <= 1 + 1e-12,
    }
    report = io.run_report(argv, None, _tolerances(_tolerance(args)), [rec])
    return (EXIT_OK if ver.passed else EXIT_INCONCLUSIVE), report


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="kreinkit", description="Operator convexity checks on Krein spaces")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--tol", type=float, default=None, help=f"verdict tolerance (env {ENV_TOL})")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        if seed:
            sp.add_argument("--seed", type=lambda s: int(s, 0), default=repro.DEFAULT_SEED)

    def space(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--J", help="fundamental symmetry matrix file")
        g.add_argument("--minkowski", type=int, help="use n-dimensional Minkowski space")

    r = sub.add_parser("repro", help="run the reproduction suite")
    common(r)
    r.add_argument("--only", action="append", choices=list(repro.CHECKS) + list(repro.ALIASES), help="run only this check (repeatable)")
    r.add_argument("--batch", type=int, default=repro.DEFAULT_BATCH, help="instances per batch check")
    r.add_argument("--figures", metavar="DIR", help="also write figures and margin CSVs to DIR")
    r.set_defaults(func=cmd_repro)

    v = sub.add_parser("verify-jensen", help="decide f(C♯AC) ≤ᴶ C♯f(A)C")
    common(v)
    space(v)
    v.add_argument("--f", required=True)
    v.add_argument("--A", help="J-positive operator file (sampled if omitted)")
    v.add_argument("--C", help="invertible J-contraction file (sampled if omitted)")
    v.add_argument("--chain", action="store_true", help="also replay the dilation proof chain")
    v.set_defaults(func=cmd_verify_jensen)

    s = sub.add_parser("search", help="search for a midpoint-convexity counterexample")
    common(s)
    space(s)
    s.add_argument("--f", required=True)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--budget", type=int, default=1000)
    s.set_defaults(func=cmd_search)

    fc = sub.add_parser("funcalc", help="compute f(A)")
    common(fc, seed=False)
    fc.add_argument("--f", required=True)
    fc.add_argument("--A", required=True)
    fc.add_argument("--method", choices=["contour", "spectral", "both", "auto"], default="both")
    fc.set_defaults(func=cmd_funcalc)

    j = sub.add_parser("julia", help="construct the Julia operator of C")
    common(j, seed=False)
    space(j)
    j.add_argument("--C", required=True)
    j.set_defaults(func=cmd_julia)
    return p


def _emit(report, out):
    text = io.dumps(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.func(args, argv)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an exit code
        code = exit_code_for(exc)
        report = io.run_report(argv, getattr(args, "seed", None), {}, [{"name": args.command, "passed": False, **_error_record(exc)}])
    _emit(report, getattr(args, "out", None))
    if code != EXIT_OK:
        failing = report.get("failed_checks") or [c.get("name") for c in report["checks"] if not c.get("passed")]
        msg = "; ".join(c.get("message", "") for c in report["checks"] if c.get("message"))
        sys.stderr.write(f"kreinkit {args.command}: exit {code}: {', '.join(map(str, failing))} {msg}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
