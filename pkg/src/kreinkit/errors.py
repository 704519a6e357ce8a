"""Exception hierarchy.

The CLI maps these onto exit codes, so every failure mode raised by the
library falls into exactly one of the classes below.
"""


class KreinError(Exception):
    """Base class for all kreinkit errors."""


class DimensionError(KreinError, ValueError):
    """Operand shapes do not fit together."""


class NotHermitianError(KreinError, ValueError):
    """A matrix that must be Hermitian is not, beyond the residual tolerance."""


class SingularMatrixError(KreinError, ValueError):
    """A matrix that must be invertible fails the singular-value test."""


class HypothesisError(KreinError):
    """A mathematical precondition of a construction or theorem is violated.

    ``hypothesis`` names the violated condition so that reports can quote it.
    """

    def __init__(self, message, hypothesis=None, data=None):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.data = data or {}


class SpectrumTooCloseError(HypothesisError):
    """An eigenvalue sits too close to a singularity of the function."""


class InconclusiveError(KreinError):
    """A numerical routine could not certify its result."""


class NotDiagonalizableError(InconclusiveError):
    """Eigenvector basis missing or too ill-conditioned for the spectral route."""


class ConvergenceError(InconclusiveError):
    """An iteration or quadrature exhausted its budget."""


class CertificateError(InconclusiveError):
    """A constructed object failed one of its verification identities."""

    def __init__(self, message, failed=None, residuals=None):
        super().__init__(message)
        self.failed = list(failed or [])
        self.residuals = dict(residuals or {})
