"""Operator theory on finite-dimensional Krein spaces.

J-adjoints and the J-order, a two-route holomorphic functional calculus,
Julia operators of J-contractions and numerical checks of Krein-operator
convexity and the Jensen-type inequality.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CertificateError,
    ConvergenceError,
    DimensionError,
    HypothesisError,
    InconclusiveError,
    KreinError,
    NotDiagonalizableError,
    NotHermitianError,
    SingularMatrixError,
    SpectrumTooCloseError,
)
from .krein import KreinSpace, make_minkowski  # noqa: E402

__all__ = [
    "CertificateError",
    "ConvergenceError",
    "DimensionError",
    "HypothesisError",
    "InconclusiveError",
    "KreinError",
    "KreinSpace",
    "NotDiagonalizableError",
    "NotHermitianError",
    "SingularMatrixError",
    "SpectrumTooCloseError",
    "make_minkowski",
]
