from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class StepReport:
    """Outcome of one named verification step."""

    step_name: str
    passed: bool
    residual_or_verdict: Any = None  # float residual or a PsdVerdict
    tolerance: float | None = None
    details: str = ""
    data: dict = field(default_factory=dict)

    def to_dict(self):
        value = self.residual_or_verdict
        if hasattr(value, "to_dict"):
            value = value.to_dict()
        return {
            "step": self.step_name,
            "passed": bool(self.passed),
            "value": value,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def first_failure(reports):
    """Name of the first failed step, or None."""
    for r in reports:
        if not r.passed:
            return r.step_name
    return None
