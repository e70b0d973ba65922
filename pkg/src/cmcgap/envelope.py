"""One-dimensional certification of the eta analysis behind the lemma2 conclusions.

Margin m2 of lemma1 with sigma <= sqrt(2 eta) gives sqrt((n-1)/n) phi >= f(eta) with

    f(eta) = eta (3 - 3(n+1)/n eta - 2 sqrt(2(n-1) eta / n)).

Each n-range has an n-free lower envelope of f.  The argument needs four
facts on a grid: the envelope sits below f, f is concave, the envelope's
minimum on [threshold, cap] is at an endpoint, and that minimum exceeds
B_n/2.  ``certify_case`` checks each one numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import b_n
from .errors import DomainError, UsageError
from .report import VerificationReport

CONCAVITY_STEP = 1e-4
CONCAVITY_THRESHOLD = -1e-6
DOMINANCE_TOL = 1e-12


def f_eta(n: int, eta):
    if n < 4:
        raise UsageError(f"n must be >= 4, got {n}")
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise DomainError(f"eta must be >= 0 (square root), got min {eta.min()}")
    out = eta * (3 - 3 * (n + 1) / n * eta - 2 * np.sqrt(2 * (n - 1) * eta / n))
    return float(out) if out.ndim == 0 else out


def envelope_small(eta):
    """Envelope valid for 4 <= n <= 20."""
    eta = np.asarray(eta, dtype=float)
    out = eta * (3 - 15 / 4 * eta - np.sqrt(38 / 5 * eta))
    return float(out) if out.ndim == 0 else out


def envelope_large(eta):
    """Envelope valid for n > 20."""
    eta = np.asarray(eta, dtype=float)
    out = eta * (3 - 66 / 21 * eta - 2 * np.sqrt(2 * eta))
    return float(out) if out.ndim == 0 else out


class CaseId(str, enum.Enum):
    SMALL_N = "SMALL_N"
    LARGE_N = "LARGE_N"


@dataclass(frozen=True)
class EnvelopeCase:
    case_id: CaseId
    eta_cap: float
    eta_threshold: float
    floor: float
    n_samples: tuple[int, ...]

    def __post_init__(self):
        if not self.eta_threshold < self.eta_cap:
            raise UsageError("eta_threshold must be below eta_cap")
        if self.floor <= 0:
            raise UsageError("floor must be positive")

    def envelope(self, eta):
        return envelope_small(eta) if self.case_id is CaseId.SMALL_N else envelope_large(eta)

    @property
    def b_half(self) -> float:
        # B_n / 2 for any n in the case's range
        return b_n(self.n_samples[0]) / 2


SMALL_N = EnvelopeCase(CaseId.SMALL_N, 1 / 5, 0.0445, 1 / 10, tuple(range(4, 21)))
LARGE_N = EnvelopeCase(CaseId.LARGE_N, 0.11, 0.04305, 0.098, (21, 30, 50, 100, 10**6))
CASES = {c.case_id.value: c for c in (SMALL_N, LARGE_N)}


def eta_cap_check(n: int) -> float:
    """Cap on eta implied by margin m1a under the lemma2 hypothesis."""
    if n < 4:
        raise UsageError(f"n must be >= 4, got {n}")
    if n <= 20:
        cap, bound = n / (10 * (n - 2)), 1 / 5
    else:
        cap, bound = 49 * n / (500 * (n - 2)), 0.11
    if cap > bound:
        raise AssertionError(f"eta cap {cap} exceeds {bound} at n={n}")
    return cap


def second_difference(func, eta: np.ndarray, h: float = CONCAVITY_STEP) -> np.ndarray:
    return (func(eta + h) - 2 * func(eta) + func(eta - h)) / (h * h)


def _sub(check_id, margin, tol, witness=None, samples=0, **details):
    return VerificationReport(check_id, margin, tol=tol, witness=witness, samples=samples, details=details)


def certify_case(case: EnvelopeCase | str, grid_points: int = 10_000) -> VerificationReport:
    """Grid certification of one case; the report's details hold every sub-check."""
    if isinstance(case, str):
        case = CASES[case]
    if grid_points < 1000:
        raise UsageError(f"grid_points must be >= 1000, got {grid_points}")
    env = case.envelope
    full = np.linspace(0.0, case.eta_cap, grid_points)
    subs = []

    # (a) envelope <= f for every sampled n
    worst, where = math.inf, None
    for n in case.n_samples:
        gap = f_eta(n, full) - env(full)
        i = int(np.argmin(gap))
        if gap[i] < worst:
            worst, where = float(gap[i]), {"n": n, "eta": float(full[i])}
    subs.append(_sub("dominance", worst, DOMINANCE_TOL, samples=grid_points * len(case.n_samples), at=where))

    # (b) concavity of f, and of the envelope itself (the endpoint step relies on it)
    inner = full[full >= CONCAVITY_STEP]
    worst, where = math.inf, None
    for n in case.n_samples:
        d2 = second_difference(lambda e: f_eta(n, e), inner)
        i = int(np.argmax(d2))
        if -d2[i] < worst:
            worst, where = float(-d2[i]), {"n": n, "eta": float(inner[i]), "f2": float(d2[i])}
    subs.append(_sub("concavity_f", worst + CONCAVITY_THRESHOLD, 0.0, samples=inner.size * len(case.n_samples), at=where))
    d2 = second_difference(env, inner)
    i = int(np.argmax(d2))
    subs.append(
        _sub("concavity_envelope", float(-d2[i]) + CONCAVITY_THRESHOLD, 0.0, samples=inner.size,
             at={"eta": float(inner[i]), "f2": float(d2[i])})
    )

    # (c) minimum over [threshold, cap] sits at an endpoint and clears the floor
    band = np.linspace(case.eta_threshold, case.eta_cap, grid_points)
    values = env(band)
    lo_end, hi_end = float(values[0]), float(values[-1])
    endpoint_min = min(lo_end, hi_end)
    grid_min = float(values.min())
    subs.append(
        _sub("endpoint_minimum", grid_min - endpoint_min, DOMINANCE_TOL, samples=grid_points,
             at={"eta": float(band[int(np.argmin(values))])}, grid_min=grid_min, endpoint_min=endpoint_min)
    )
    subs.append(
        _sub("floor", endpoint_min - case.floor, 0.0, samples=2,
             endpoint_values=[lo_end, hi_end], floor=case.floor)
    )

    # (d) contradiction: envelope > B_n/2 >= sqrt((n-1)/n) phi on the whole interval
    subs.append(
        _sub("contradiction", grid_min - case.b_half, 0.0, samples=grid_points, b_half=case.b_half)
    )
    # strict inequalities: a zero margin is a failure here
    for s in subs:
        if s.check_id in ("floor", "contradiction"):
            s.passed = s.worst_margin > 0

    worst_sub = min(subs, key=lambda s: s.worst_margin)
    return VerificationReport(
        check_id=f"envelope[{case.case_id.value}]",
        worst_margin=worst_sub.worst_margin,
        tol=0.0,
        samples=sum(s.samples for s in subs),
        details={
            "eta_threshold": case.eta_threshold,
            "eta_cap": case.eta_cap,
            "endpoint_values": [lo_end, hi_end],
            "checks": [s.to_dict() for s in subs],
        },
        passed=all(s.passed for s in subs),
    )
