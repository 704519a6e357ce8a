"""JSON matrix files and run reports.

Matrix file schema::

    {"rows": 2, "cols": 2, "role": "operator",
     "entries": [[[1.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [-2.0, 0.0]]]}

Entries are row-major ``[re, im]`` pairs of finite doubles.  ``role`` is
optional (``"operator"`` or ``"symmetry"``).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from . import __version__

REPORT_SCHEMA = "kreinkit.run-report/1"
MATRIX_ROLES = ("operator", "symmetry")
_MAX_DENOMINATOR = 2**20


class MatrixFileError(ValueError):
    """Malformed matrix file."""


def matrix_to_json(M, role=None):
    M = np.asarray(M, dtype=complex)
    doc = {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }
    if role is not None:
        doc["role"] = role
    return doc


def matrix_from_json(doc):
    try:
        rows, cols, entries = int(doc["rows"]), int(doc["cols"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(f"missing or invalid rows/cols/entries: {exc}") from exc
    if rows < 1 or cols < 1:
        raise MatrixFileError("rows and cols must be positive")
    role = doc.get("role")
    if role is not None and role not in MATRIX_ROLES:
        raise MatrixFileError(f"unknown role {role!r}")
    if not isinstance(entries, list) or len(entries) != rows:
        raise MatrixFileError(f"expected {rows} rows of entries")
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise MatrixFileError(f"row {i} does not have {cols} entries")
        for k, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
            ):
                raise MatrixFileError(f"entry ({i},{k}) is not an [re, im] pair")
            re, im = float(pair[0]), float(pair[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise MatrixFileError(f"entry ({i},{k}) is not finite")
            out[i, k] = complex(re, im)
    return out


def read_matrix(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path}: invalid JSON: {exc}") from exc
    return matrix_from_json(doc)


def write_matrix(path, M, role=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(M, role), fh)
        fh.write("\n")


def format_real(x):
    """Exact rational for short dyadic values (e.g. ``-1/4``), else 17 significant digits."""
    x = float(x)
    if x == 0.0:
        return "0"
    fr = Fraction(x)
    if fr.denominator <= _MAX_DENOMINATOR and abs(fr.numerator) < 2**53:
        return str(fr)
    return f"{x:.17g}"


def format_entry(z):
    z = complex(z)
    if z.imag == 0.0:
        return format_real(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{format_real(z.real)}{sign}{format_real(abs(z.imag))}i"


def format_matrix(M):
    return [[format_entry(z) for z in row] for row in np.asarray(M)]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return matrix_to_json(x) if x.ndim == 2 else [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def run_report(command, seed, tolerances, checks, extra=None):
    passed = all(c.get("passed", False) for c in checks)
    doc = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "command": list(command),
        "seed": seed,
        "tolerances": dict(tolerances),
        "checks": checks,
        "passed": passed,
    }
    if extra:
        doc.update(extra)
    return _jsonable(doc)


def dumps(doc):
    return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=False)
