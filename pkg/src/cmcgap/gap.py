"""Gap-theorem algebra: Simons balance, forbidden-band inequalities, classification, models.

The band is (alpha, alpha + delta]; S-values there are ruled out for
complete hypersurfaces with constant H and S.  The two-curvature product
models realize the boundary S = alpha (k = 1) and the higher alpha_k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    CmcInvariants,
    SpaceFormContext,
    alpha_general,
    alpha_k,
    b_n,
    delta_band,
    lambda_general,
    lambda_k,
    ring_alpha,
)
from .errors import DegenerateInputError, DomainError, UsageError
from .spectrum import TraceFreeSpectrum, make_spectrum

MUENZNER_G = (1, 2, 3, 4, 6)
BAND_TOL = 1e-9
# Relative tolerance of classify.  Wide enough that a boundary value quoted
# to 6 significant digits (7.61133 for alpha(4,1,1)) still lands on the boundary.
CLASSIFY_RTOL = 1e-6


def simons_rhs(n: int, H: float, c: float, ring_s: float) -> float:
    """ring_S [ring_S - n(H^2+c) + (n-2) sqrt(n/(n-1) ring_S) H].

    Equals |grad h|^2 + n H ring_S^{3/2} phi when H and S are constant.
    """
    if ring_s < 0:
        raise DomainError(f"ring_S must be >= 0, got {ring_s}")
    H = abs(H)
    return ring_s * (ring_s - n * (H * H + c) + (n - 2) * math.sqrt(n / (n - 1) * ring_s) * H)


def simons_balance_residual(n, H, c, ring_s, grad_norm_sq, phi) -> float:
    """|grad h|^2 + n H ring_S^{3/2} phi - simons_rhs; zero for a consistent configuration."""
    if grad_norm_sq < 0:
        raise DomainError("|grad h|^2 must be >= 0")
    return grad_norm_sq + n * abs(H) * ring_s**1.5 * phi - simons_rhs(n, H, c, ring_s)


def _band(n, H, c):
    ctx = SpaceFormContext(n, c)
    ctx.require_theorem_range()
    ra = ring_alpha(ctx, H)
    return ra, delta_band(ctx, H)


def _check_in_band(ring_s, ra, delta):
    lo, hi = ra, ra + delta
    slack = BAND_TOL * max(1.0, hi)
    if np.any(np.asarray(ring_s) < lo - slack) or np.any(np.asarray(ring_s) > hi + slack):
        raise UsageError(f"ring_S must lie in the band [{lo:.12g}, {hi:.12g}]")


def band_phi_bound(n, H, c, ring_s):
    """(lhs, rhs) with lhs <= rhs inside the band; forces phi <= (B_n/2) sqrt(n/(n-1)).

    ``ring_s`` may be an array, in which case arrays are returned.
    """
    ra, delta = _band(n, H, c)
    _check_in_band(ring_s, ra, delta)
    H = abs(H)
    s = np.asarray(ring_s, dtype=float)
    root = np.sqrt(n / (n - 1) * s)
    lhs = s - n * (H * H + c) + (n - 2) * root * H
    rhs = b_n(n) * n / 2 * root * H
    if s.ndim == 0:
        return float(lhs), float(rhs)
    return lhs, rhs


def band_eta_coefficient(n, H, c, ring_s):
    """(value, floor) with value >= floor = -(6/5) n H sqrt(ring_S) inside the band."""
    ra, delta = _band(n, H, c)
    _check_in_band(ring_s, ra, delta)
    H = abs(H)
    s = np.asarray(ring_s, dtype=float)
    root = np.sqrt(s)
    value = math.sqrt((n - 1) / n) * (n * (H * H + c) - s) - 2 * (n - 1) * H * root
    floor = -6 / 5 * n * H * root
    if s.ndim == 0:
        return float(value), float(floor)
    return value, floor


def band_grid(n, H, c, points: int = 1000) -> np.ndarray:
    ra, delta = _band(n, H, c)
    return np.linspace(ra, ra + delta, points)


def band_margins(n, H, c, points: int = 1000) -> tuple[float, float]:
    """Worst (rhs - lhs) and worst (value - floor) over a grid of the band."""
    s = band_grid(n, H, c, points)
    lhs, rhs = band_phi_bound(n, H, c, s)
    value, floor = band_eta_coefficient(n, H, c, s)
    return float(np.min(rhs - lhs)), float(np.min(value - floor))


class GapTag(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    RIGID_BOUNDARY = "RigidBoundary"
    FORBIDDEN_BAND = "ForbiddenBand"
    ABOVE = "Above"


@dataclass(frozen=True)
class GapRegion:
    tag: GapTag
    alpha: float
    delta: float
    S: float
    tol: float
    margins: dict = field(default_factory=dict)

    @property
    def band(self) -> tuple[float, float]:
        return self.alpha, self.alpha + self.delta


def classify(n: int, H: float, c: float, S: float, rtol: float = CLASSIFY_RTOL) -> GapRegion:
    """Locate S relative to alpha(n, H, c) and the forbidden band."""
    ctx = SpaceFormContext(n, c)
    ctx.require_theorem_range()
    if H * H + c <= 0:
        raise DomainError(f"need H^2 + c > 0, got H={H}, c={c}")
    CmcInvariants(H, S, n)
    alpha = alpha_general(ctx, H)
    delta = delta_band(ctx, H)
    tol = rtol * max(1.0, alpha)
    if S < alpha - tol:
        tag = GapTag.SUBCRITICAL
    elif abs(S - alpha) <= tol:
        tag = GapTag.RIGID_BOUNDARY
    elif S <= alpha + delta + tol:
        tag = GapTag.FORBIDDEN_BAND
    else:
        tag = GapTag.ABOVE
    margins = {"to_alpha": S - alpha, "to_band_top": S - (alpha + delta)}
    return GapRegion(tag, alpha, delta, S, tol, margins)


@dataclass(frozen=True)
class ModelHypersurface:
    """Two principal curvatures: lam with multiplicity n-k and -c/lam with multiplicity k.

    When the raw mean curvature is negative the normal is flipped, so the
    stored curvatures and H are those of the H >= 0 orientation.
    """

    n: int
    k: int
    lam: float
    c: float
    principal_curvatures: tuple[float, ...]
    H: float
    S: float

    @property
    def ring_s(self) -> float:
        return self.S - self.n * self.H**2


def clifford_model(n: int, k: int, lam: float, c: float = 1.0) -> ModelHypersurface:
    if n < 2 or not 1 <= k <= n - 1:
        raise UsageError(f"need 1 <= k <= n-1, got n={n}, k={k}")
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    other = -c / lam
    curv = [lam] * (n - k) + [other] * k
    H = ((n - k) * lam + k * other) / n
    if H < 0:
        curv = [-x for x in curv]
        H = -H
    S = (n - k) * lam * lam + k * other * other
    return ModelHypersurface(n, k, lam, c, tuple(sorted(curv)), H, S)


def boundary_model(n: int, H: float, c: float = 1.0) -> ModelHypersurface:
    """The rigid model at S = alpha(n, H, c): k = 1 with lam = lambda_general(n, H, c)."""
    return clifford_model(n, 1, lambda_general(SpaceFormContext(n, c), H), c)


def muenzner_s(n: int, g: int) -> float:
    """S = (g-1) n for closed minimal isoparametric hypersurfaces with g distinct curvatures."""
    if g not in MUENZNER_G:
        raise UsageError(f"g must be one of {MUENZNER_G}, got {g}")
    return float((g - 1) * n)


def spectrum_of_model(m: ModelHypersurface) -> TraceFreeSpectrum:
    """mu_i = (lambda_i - H) / sqrt(ring_S), sorted."""
    ring_s = m.ring_s
    if ring_s <= 1e-14 * max(1.0, m.S):
        raise DegenerateInputError("model is totally umbilical (ring_S = 0)")
    mu = (np.asarray(m.principal_curvatures) - m.H) / math.sqrt(ring_s)
    return make_spectrum(mu)


def nearest_model(n: int, H: float, c: float, S: float) -> tuple[int, float, float]:
    """(k, lambda, S_model) of the two-curvature model with S_model closest to S.

    On the unit sphere every k = 1..n-1 is available; otherwise only the
    boundary model k = 1.
    """
    if c == 1.0:
        k = min(range(1, n), key=lambda j: abs(alpha_k(n, H, j) - S))
        return k, lambda_k(n, H, k), alpha_k(n, H, k)
    m = boundary_model(n, H, c)
    return 1, m.lam, m.S
