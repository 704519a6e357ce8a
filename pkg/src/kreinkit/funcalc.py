"""Holomorphic functional calculus for small dense matrices.

Two independent routes compute ``f(A)``:

* :func:`calculus_contour` evaluates the Cauchy/Dunford integral
  ``(1/2πi) ∮ f(λ)(λI − A)^{-1} dλ`` by the trapezoidal rule on circles that
  enclose the spectrum, doubling the nodes until successive results agree;
* :func:`calculus_spectral` diagonalises ``A = S Λ S^{-1}`` and returns
  ``S f(Λ) S^{-1}``.

The open set on which ``f`` is analytic is represented as the plane minus a
finite set of ``excluded_points`` (poles); contours keep a clearance from
them.  Contour circles may be disjoint, so disconnected domains are fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ConvergenceError,
    HypothesisError,
    NotDiagonalizableError,
    SpectrumTooCloseError,
)
from .krein import is_j_selfadjoint, is_j_unitary, j_adjoint
from .linalg import fro, match_spectra, require_square, spectrum
from .reports import StepReport

CONTOUR_RTOL = 1e-10
MAX_NODES = 2**14
INITIAL_NODES = 32
COND_MAX = 1e6
CLEARANCE_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """Scalar analytic function with its domain of analyticity.

    ``evaluate`` must accept complex numpy arrays.  ``value_at_zero`` is a
    stored convention for ``f(0)``; it is only consulted by hypothesis checks
    and never used by the calculus itself.
    """

    name: str
    evaluate: Callable
    excluded_points: tuple = ()
    real_on_real: bool = True
    value_at_zero: complex | None = None
    coefficients: tuple | None = None  # ascending, when f is a polynomial

    def __call__(self, z):
        return self.evaluate(np.asarray(z, dtype=complex))

    def distance_to_exclusions(self, z):
        if not self.excluded_points:
            return math.inf
        e = np.asarray(self.excluded_points, dtype=complex)
        return float(np.min(np.abs(np.asarray(z, dtype=complex).reshape(-1, 1) - e)))

    def is_analytic_at(self, z, clearance=0.0):
        return self.distance_to_exclusions(z) > clearance

    def nearest_exclusion(self, z):
        e = np.asarray(self.excluded_points, dtype=complex)
        return complex(e[np.argmin(np.abs(e - z))])

    def invariant_residuals(self, n_samples=64):
        """``(max real-axis imaginary part, max reflection defect)`` on fixed samples.

        Both are relative: ``|Im f(x)| / (1 + |f(x)|)`` and
        ``|f(z̄) − conj f(z)| / (1 + |f(z)|)``.
        """
        x = np.linspace(-3.0, 3.0, n_samples) + 0.0137
        theta = np.linspace(0.1, 2 * np.pi, n_samples)
        z = (0.3 + 2.5 * np.linspace(0, 1, n_samples)) * np.exp(1j * theta)
        sep = 1e-3
        x = x[[self.is_analytic_at(t, sep) for t in x]]
        z = z[[self.is_analytic_at(t, sep) for t in z]]
        fx = self(x)
        fz = self(z)
        real_res = float(np.max(np.abs(fx.imag) / (1 + np.abs(fx)))) if x.size else 0.0
        refl = float(np.max(np.abs(self(z.conj()) - fz.conj()) / (1 + np.abs(fz))))
        return real_res, refl


def polynomial(coefficients, name=None):
    """``c0 + c1 z + c2 z² + …`` from ascending coefficients."""
    c = tuple(complex(x) for x in coefficients) or (0j,)
    desc = np.array(c[::-1])
    real = all(x.imag == 0 for x in c)
    label = name or "poly:" + ",".join(_fmt_coef(x) for x in c)
    return AnalyticFunction(
        label,
        lambda z: np.polyval(desc, z),
        (),
        real,
        c[0],
        c,
    )


def exponential():
    return AnalyticFunction("exp", np.exp, (), True, 1.0 + 0j)


def inverse():
    """``1/z`` on ``C \\ {0}``, with the stored convention ``f(0) = 0``."""

    def _inv(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / z

    return AnalyticFunction("inv", _inv, (0j,), True, 0j)


def rational(numerator, denominator, name=None):
    """``p(z)/q(z)`` from ascending coefficient lists; poles are the roots of ``q``."""
    num = np.array([complex(x) for x in numerator])
    den = np.array([complex(x) for x in denominator])
    if not np.any(den != 0):
        raise ValueError("denominator is identically zero")
    den = np.trim_zeros(den, "b")
    poles = tuple(complex(r) for r in np.roots(den[::-1])) if den.size > 1 else ()
    real = bool(np.all(num.imag == 0) and np.all(den.imag == 0))
    at_zero = num[0] / den[0] if den[0] != 0 else None

    def _rat(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.polyval(num[::-1], z) / np.polyval(den[::-1], z)

    label = name or (
        "rational:" + ",".join(_fmt_coef(x) for x in num) + "/" + ",".join(_fmt_coef(x) for x in den)
    )
    return AnalyticFunction(label, _rat, poles, real, at_zero)


def _fmt_coef(x):
    x = complex(x)
    if x.imag == 0:
        r = x.real
        return str(int(r)) if r.is_integer() else repr(r)
    return repr(x).strip("()")


def _parse_coefs(text):
    return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]


def parse_function(spec):
    """Build a function from its registry name.

    Accepted: ``poly:c0,c1,…``, ``exp``, ``inv``, ``rational:<num>/<den>``
    (comma-separated ascending coefficients on each side), and the aliases
    ``square`` (``poly:0,0,1``) and ``id`` (``poly:0,1``).
    """
    spec = spec.strip()
    if spec == "exp":
        return exponential()
    if spec == "inv":
        return inverse()
    if spec == "square":
        return polynomial([0, 0, 1], name="square")
    if spec == "id":
        return polynomial([0, 1], name="id")
    if spec.startswith("poly:"):
        return polynomial(_parse_coefs(spec[5:]), name=spec)
    if spec.startswith("rational:"):
        body = spec[9:]
        if body.count("/") != 1:
            raise ValueError(f"rational needs exactly one '/': {spec!r}")
        num, den = body.split("/")
        return rational(_parse_coefs(num), _parse_coefs(den), name=spec)
    raise ValueError(f"unknown function {spec!r}")


def matrix_polynomial(coefficients, A):
    """Horner evaluation ``c0 I + A(c1 I + A(c2 I + …))`` by matrix products."""
    A = require_square(A)
    eye = np.eye(A.shape[0], dtype=complex)
    out = np.zeros_like(A)
    for c in reversed(list(coefficients)):
        out = out @ A + complex(c) * eye
    return out


# --------------------------------------------------------------------------
# Contours
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    nodes: int = INITIAL_NODES

    def contains(self, z):
        return abs(complex(z) - self.center) < self.radius


@dataclass(frozen=True)
class Contour:
    circles: tuple

    def enclosing(self, z):
        return [i for i, c in enumerate(self.circles) if c.contains(z)]

    def is_symmetric(self, atol=0.0):
        for c in self.circles:
            mirror = [
                d
                for d in self.circles
                if abs(d.center - c.center.conjugate()) <= atol and abs(d.radius - c.radius) <= atol
            ]
            if not mirror:
                return False
        return True


def default_clearance(eigs):
    eigs = np.asarray(eigs, dtype=complex)
    diam = float(np.max(np.abs(eigs[:, None] - eigs[None, :]))) if eigs.size > 1 else 0.0
    return max(0.05 * diam, CLEARANCE_FLOOR)


def _single_linkage(pts, link):
    m = pts.size
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    d = np.abs(pts[:, None] - pts[None, :])
    for i in range(m):
        for j in range(i + 1, m):
            if d[i, j] < link:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [frozenset(g) for g in groups.values()]


def _mirror(g, n):
    return frozenset((i + n) % (2 * n) for i in g)


def _circles_for(groups, pts, n, expand):
    """One circle per group; conjugate groups get exactly mirrored circles."""
    out = {}
    for g in sorted(groups, key=min):
        if g in out:
            continue
        gm = _mirror(g, n)
        members = pts[sorted(g)]
        center = complex(members.mean())
        if gm == g:
            center = complex(center.real, 0.0)
            out[g] = (center, float(np.max(np.abs(members - center))) + expand(g))
            continue
        if center.imag < 0:
            g, gm = gm, g
            members = pts[sorted(g)]
            center = complex(members.mean())
        radius = float(np.max(np.abs(members - center))) + expand(g)
        out[g] = (center, radius)
        out[gm] = (center.conjugate(), radius)
    return [(g, c, r) for g, (c, r) in out.items()]


def _merge_overlaps(groups, pts, n, expand):
    groups = set(groups)
    while True:
        circles = _circles_for(groups, pts, n, expand)
        hit = None
        for a in range(len(circles)):
            for b in range(a + 1, len(circles)):
                if abs(circles[a][1] - circles[b][1]) <= circles[a][2] + circles[b][2]:
                    hit = circles[a][0] | circles[b][0]
                    break
            if hit is not None:
                break
        if hit is None:
            return circles
        hit_m = _mirror(hit, n)
        rest = {g for g in groups if not (g & hit or g & hit_m)}
        if hit & hit_m:
            rest.add(hit | hit_m)
        else:
            rest.update((hit, hit_m))
        groups = rest


def build_contour(spec, f, clearance_min=None, nodes=INITIAL_NODES, adaptive=True):
    """Circles around the spectrum, symmetric about the real axis.

    Eigenvalues closer than ``4·clearance_min`` share a circle (single
    linkage) and intersecting circles are merged.  A circle's radius is the
    cluster radius plus an expansion of at least ``clearance_min``; with
    ``adaptive`` the expansion grows to ``0.4×`` the distance from the cluster
    to the nearest foreign eigenvalue or pole (capped at
    ``0.5·(1 + spectral radius)``), which keeps the resolvent well
    conditioned on the contour.  Poles must stay at least ``clearance_min/2``
    outside every circle; if that fails the plain expansion and then smaller
    linkage thresholds are tried.
    """
    eigs = np.asarray(spec, dtype=complex).ravel()
    if eigs.size == 0:
        return Contour(())
    c = default_clearance(eigs) if clearance_min is None else float(clearance_min)
    excl = np.asarray(f.excluded_points, dtype=complex)
    for lam in eigs:
        if excl.size and np.min(np.abs(excl - lam)) <= 2 * c:
            e = f.nearest_exclusion(lam)
            raise SpectrumTooCloseError(
                f"eigenvalue {lam:.6g} lies within {2 * c:.3g} of excluded point {e:.6g} of {f.name}",
                hypothesis=f"spectrum clear of excluded point {_fmt_coef(e)}",
                data={"eigenvalue": lam, "excluded_point": e, "clearance": c},
            )
    n = eigs.size
    pts = np.concatenate([eigs, eigs.conj()])
    cap = max(c, 0.5 * (1.0 + float(np.max(np.abs(eigs)))))

    def plain(g):
        return c

    def wide(g):
        inside = pts[sorted(g)]
        others = np.concatenate([np.delete(pts, sorted(g)), excl])
        if others.size == 0:
            return cap
        d = float(np.min(np.abs(inside[:, None] - others[None, :])))
        return max(c, min(0.4 * d, cap))

    policies = (wide, plain) if adaptive else (plain,)
    link = 4 * c
    while link >= c:
        groups = _single_linkage(pts, link)
        for expand in policies:
            circles = _merge_overlaps(groups, pts, n, expand)
            if all(np.all(np.abs(excl - ctr) >= r + 0.5 * c) for _, ctr, r in circles):
                out = sorted(
                    (Circle(ctr, r, nodes) for _, ctr, r in circles),
                    key=lambda k: (k.center.real, k.center.imag),
                )
                return Contour(tuple(out))
        link /= 2
    raise SpectrumTooCloseError(
        f"no contour separates the spectrum from the excluded points of {f.name}",
        hypothesis="spectrum separable from excluded points",
        data={"clearance": c},
    )


def validate_contour(contour, eigs, f):
    """Raise if an eigenvalue is not inside exactly one circle or a pole is inside any."""
    for lam in np.asarray(eigs, dtype=complex).ravel():
        k = contour.enclosing(lam)
        if len(k) != 1:
            raise HypothesisError(
                f"eigenvalue {lam:.6g} is inside {len(k)} circles",
                hypothesis="contour encloses spectrum",
            )
    for e in f.excluded_points:
        if contour.enclosing(e):
            raise SpectrumTooCloseError(
                f"excluded point {e} of {f.name} lies inside the contour",
                hypothesis=f"spectrum clear of excluded point {_fmt_coef(e)}",
            )


# --------------------------------------------------------------------------
# The two routes
# --------------------------------------------------------------------------


@dataclass
class CalculusResult:
    value: np.ndarray
    method: str
    residual: float  # contour: last successive difference; spectral: eigenvector condition
    nodes: list = field(default_factory=list)
    history: list = field(default_factory=list)  # per circle: [(nodes, difference), …]


def _circle_integral(f, A, circle, rtol, max_nodes):
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)

    def node_sum(theta):
        w = np.exp(1j * theta)
        z = circle.center + circle.radius * w
        R = np.linalg.solve(z[:, None, None] * eye - A, np.broadcast_to(eye, (z.size, n, n)))
        coeff = f(z) * circle.radius * w
        return np.tensordot(coeff, R, axes=(0, 0))

    N = circle.nodes
    total = node_sum(2 * np.pi * np.arange(N) / N)
    value = total / N
    history = []
    while 2 * N <= max_nodes:
        total = total + node_sum(2 * np.pi * (np.arange(N) + 0.5) / N)
        N *= 2
        new = total / N
        diff = fro(new - value)
        history.append((N, diff))
        value = new
        if diff <= rtol * (1.0 + fro(value)):
            return value, N, history
    raise ConvergenceError(
        f"quadrature on circle at {circle.center:.4g} (r={circle.radius:.3g}) did not converge in "
        f"{max_nodes} nodes; last difference {history[-1][1] if history else math.nan:.3e}"
    )


def calculus_contour(f, A, contour=None, rtol=CONTOUR_RTOL, max_nodes=MAX_NODES):
    """``f(A)`` by trapezoidal quadrature of the resolvent integral.

    Each circle is refined independently, doubling the nodes until two
    successive values differ by at most ``rtol·(1 + ‖value‖_F)``; the circle
    contributions are summed in circle order.
    """
    A = require_square(A)
    eigs = spectrum(A)
    if contour is None:
        contour = build_contour(eigs, f)
    validate_contour(contour, eigs, f)
    out = np.zeros_like(A)
    nodes, history = [], []
    residual = 0.0
    for circle in contour.circles:
        val, N, hist = _circle_integral(f, A, circle, rtol, max_nodes)
        out = out + val
        nodes.append(N)
        history.append(hist)
        residual = max(residual, hist[-1][1])
    return CalculusResult(out, "contour", residual, nodes, history)


def calculus_spectral(f, A, cond_max=COND_MAX):
    """``S f(Λ) S^{-1}`` from an eigendecomposition of a diagonalisable ``A``."""
    A = require_square(A)
    w, S = np.linalg.eig(A)
    S = S / np.linalg.norm(S, axis=0)
    cond = float(np.linalg.cond(S)) if A.size else 1.0
    if not np.isfinite(cond) or cond > cond_max:
        raise NotDiagonalizableError(
            f"eigenvector basis condition number {cond:.3e} exceeds {cond_max:g}; "
            "use the contour route"
        )
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    for lam in w:
        if f.excluded_points and f.distance_to_exclusions(lam) <= 1e-12 * scale:
            e = f.nearest_exclusion(lam)
            raise SpectrumTooCloseError(
                f"eigenvalue {lam:.6g} coincides with excluded point {e:.6g} of {f.name}",
                hypothesis=f"spectrum clear of excluded point {_fmt_coef(e)}",
                data={"eigenvalue": lam, "excluded_point": e},
            )
    fw = f(w)
    value = np.linalg.solve(S.T, (S * fw).T).T
    return CalculusResult(value, "spectral", cond)


def calculus(f, A, method="auto", **kwargs):
    """Dispatch to a route; ``auto`` tries spectral first and falls back to contour."""
    if method == "contour":
        return calculus_contour(f, A, **kwargs)
    if method == "spectral":
        return calculus_spectral(f, A, **kwargs)
    if method == "auto":
        try:
            return calculus_spectral(f, A)
        except NotDiagonalizableError:
            return calculus_contour(f, A)
    raise ValueError(f"unknown method {method!r}")


def matrix_function(f, A, method="auto"):
    return calculus(f, A, method).value


# --------------------------------------------------------------------------
# Structural checks
# --------------------------------------------------------------------------


def check_j_selfadjoint_calculus(f, A, K, method="contour", rtol=1e-9):
    """``f(A)`` of a J-selfadjoint ``A`` is J-selfadjoint when ``f`` is real on the reals."""
    ok, res = is_j_selfadjoint(A, K)
    if not ok:
        raise HypothesisError(f"A is not J-selfadjoint (residual {res:.3e})", hypothesis="J-selfadjoint")
    if not f.real_on_real:
        raise HypothesisError(f"{f.name} is not real on the real axis", hypothesis="real on real")
    F = matrix_function(f, A, method)
    J = K.J
    residual = fro(J @ F - F.conj().T @ J)
    bound = rtol * (1.0 + fro(F))
    return StepReport(
        "j-selfadjoint calculus",
        residual <= bound,
        residual,
        bound,
        f"‖Jf(A) − f(A)*J‖_F for f = {f.name} via {method}",
    )


def check_unitary_covariance(f, A, U, K, method="contour", rtol=1e-8, spectrum_tol=1e-8):
    """``f(U♯AU) = U♯ f(A) U`` for J-unitary ``U``, plus equality of spectra."""
    okU, resU = is_j_unitary(U, K)
    if not okU:
        raise HypothesisError(f"U is not J-unitary (residual {resU:.3e})", hypothesis="J-unitary")
    ok, res = is_j_selfadjoint(A, K)
    if not ok:
        raise HypothesisError(f"A is not J-selfadjoint (residual {res:.3e})", hypothesis="J-selfadjoint")
    Us = j_adjoint(U, K)
    B = Us @ A @ U
    FA = matrix_function(f, A, method)
    FB = matrix_function(f, B, method)
    residual = fro(FB - Us @ FA @ U)
    bound = rtol * (1.0 + fro(FA))
    sa, sb = spectrum(A), spectrum(B)
    spec_dist = match_spectra(sa, sb)
    spec_bound = spectrum_tol * max(1.0, float(np.max(np.abs(sa))))
    passed = residual <= bound and spec_dist <= spec_bound
    return StepReport(
        "unitary covariance",
        passed,
        residual,
        bound,
        f"‖f(U♯AU) − U♯f(A)U‖_F for f = {f.name} via {method}; spectrum distance {spec_dist:.3e}",
        {"spectrum_distance": spec_dist, "spectrum_bound": spec_bound},
    )

