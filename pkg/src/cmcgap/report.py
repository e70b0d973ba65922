from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

SIG_DIGITS = 12


def round_sig(x: float, digits: int = SIG_DIGITS):
    """Round to ``digits`` significant digits; non-finite values become None (JSON null)."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def jsonable(obj):
    """Recursively convert numbers to 12-significant-digit floats and tuples to lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``passed`` is ``worst_margin >= -tol`` unless a composite check sets it
    from its sub-checks.  A margin of +inf means nothing was evaluated
    (e.g. no feasible start).
    """

    check_id: str
    worst_margin: float
    tol: float = 1e-9
    witness: Any = None
    samples: int = 0
    seed: int | None = None
    details: dict = field(default_factory=dict)
    passed: bool | None = None

    def __post_init__(self):
        self.worst_margin = float(self.worst_margin)
        if self.passed is None:
            self.passed = bool(self.worst_margin >= -self.tol)

    def to_dict(self) -> dict:
        witness = self.witness
        if witness is not None and hasattr(witness, "mu"):
            witness = witness.mu
        return {
            "check_id": self.check_id,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "tolerance": self.tol,
            "witness": witness,
            "samples": self.samples,
            "seed": self.seed,
            "details": self.details,
        }
