"""Closed-form pinching constants for CMC hypersurfaces in space forms.

All functions are pure and evaluate in binary64.  ``H`` may carry either
sign: the formulas only see ``H**2`` or ``|H|``.

The constant alpha(n, H, c) is the rigidity threshold for the squared
length S of the second fundamental form; the gap theorem forbids
S in (alpha, alpha + delta] for complete hypersurfaces with constant mean
and scalar curvature.  ``alpha_k`` / ``lambda_k`` describe the product
models S^{n-k} x S^k of the unit sphere, and ``beta = alpha_{n-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import bisect

from .errors import DomainError, UsageError

B_SMALL = Fraction(1, 5)
B_LARGE = Fraction(49, 250)


@dataclass(frozen=True)
class SpaceFormContext:
    """Ambient space form F^{n+1}(c): dimension n of the hypersurface, curvature c."""

    n: int
    c: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise UsageError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 3:
            raise UsageError(f"n must be >= 3, got {self.n}")
        if not math.isfinite(self.c):
            raise UsageError(f"c must be finite, got {self.c!r}")

    def require_theorem_range(self) -> None:
        if self.n < 4:
            raise UsageError(f"the gap theorems need n >= 4, got n={self.n}")


@dataclass(frozen=True)
class CmcInvariants:
    """Mean curvature H and squared norm S of the second fundamental form."""

    H: float
    S: float
    n: int

    def __post_init__(self):
        if self.S < 0:
            raise DomainError(f"S must be nonnegative, got {self.S}")
        if self.ring_s < -1e-12 * max(1.0, self.S):
            raise DomainError(
                f"S={self.S} < n*H^2={self.n * self.H**2}: trace-free part would be negative"
            )

    @property
    def ring_s(self) -> float:
        return self.S - self.n * self.H * self.H


@dataclass(frozen=True)
class PinchingProfile:
    n: int
    H: float
    c: float
    alpha: float
    ring_alpha: float
    beta: float
    alpha_k: tuple[float, ...]  # k = 1..n-1, unit sphere
    b_n: float
    delta: float
    lambda_k: tuple[float, ...]  # k = 1..n-1, unit sphere


def _as_ctx(ctx) -> SpaceFormContext:
    if isinstance(ctx, SpaceFormContext):
        return ctx
    n, c = ctx
    return SpaceFormContext(n, c)


def _check_k(n: int, k: int) -> None:
    if int(k) != k or not 1 <= k <= n - 1:
        raise UsageError(f"k must be an integer in [1, {n - 1}], got {k!r}")


def _radicand(n: int, H: float, c: float) -> float:
    h2 = H * H
    rad = n * n * h2 * h2 + 4 * (n - 1) * c * h2
    if rad < 0:
        raise DomainError(
            f"negative radicand n^2H^4 + 4(n-1)cH^2 = {rad} at (n={n}, H={H}, c={c})"
        )
    return rad


def alpha_general(ctx, H: float) -> float:
    """alpha(n, H, c) = nc + n^3 H^2/(2(n-1)) - n(n-2)/(2(n-1)) sqrt(n^2 H^4 + 4(n-1) c H^2)."""
    ctx = _as_ctx(ctx)
    n, c = ctx.n, ctx.c
    rad = _radicand(n, H, c)
    return n * c + n**3 * H * H / (2 * (n - 1)) - n * (n - 2) / (2 * (n - 1)) * math.sqrt(rad)


def ring_alpha(ctx, H: float) -> float:
    """Trace-free threshold alpha - n H^2."""
    ctx = _as_ctx(ctx)
    return alpha_general(ctx, H) - ctx.n * H * H


def alpha_k(n: int, H: float, k: int) -> float:
    """Squared norm S of the unit-sphere model S^{n-k} x S^k with mean curvature H."""
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    _check_k(n, k)
    h2 = H * H
    kk = k * (n - k)
    return n + n**3 * h2 / (2 * kk) - n * (n - 2 * k) / (2 * kk) * math.sqrt(n * n * h2 * h2 + 4 * kk * h2)


def beta(n: int, H: float) -> float:
    if n < 3:
        raise UsageError(f"n must be >= 3, got {n}")
    h2 = H * H
    return n + n**3 * h2 / (2 * (n - 1)) + n * (n - 2) / (2 * (n - 1)) * math.sqrt(n * n * h2 * h2 + 4 * (n - 1) * h2)


def b_n_exact(n: int) -> Fraction:
    if n < 4:
        raise UsageError(f"B_n is defined for n >= 4, got {n}")
    return B_SMALL if n <= 20 else B_LARGE


def b_n(n: int) -> float:
    """B_n = 1/5 for 4 <= n <= 20 and 49/250 for n > 20."""
    return float(b_n_exact(n))


def delta_band(ctx, H: float) -> float:
    """Width B_n * min{n H^2/(n-1), ring_alpha} of the forbidden band above alpha."""
    ctx = _as_ctx(ctx)
    ctx.require_theorem_range()
    if H * H + ctx.c <= 0:
        raise DomainError(f"need H^2 + c > 0, got H={H}, c={ctx.c}")
    n = ctx.n
    return b_n(n) * min(n * H * H / (n - 1), ring_alpha(ctx, H))


def lambda_k(n: int, H: float, k: int) -> float:
    """Principal curvature of the (n-k)-fold factor of the model realizing alpha_k."""
    _check_k(n, k)
    return (n * abs(H) + math.sqrt(n * n * H * H + 4 * k * (n - k))) / (2 * (n - k))


def lambda_general(ctx, H: float) -> float:
    """Curvature of the (n-1)-fold factor of the rigid model F^{n-1}(c+lam^2) x F^1(c+c^2/lam^2)."""
    ctx = _as_ctx(ctx)
    n, c = ctx.n, ctx.c
    rad = n * n * H * H + 4 * (n - 1) * c
    if rad < 0:
        raise DomainError(f"negative radicand n^2H^2 + 4(n-1)c = {rad} at (n={n}, H={H}, c={c})")
    return (n * abs(H) + math.sqrt(rad)) / (2 * (n - 1))


def _lemma3_sides(ctx: SpaceFormContext, H: float) -> tuple[float, float, float]:
    n, c = ctx.n, ctx.c
    if H * H + c <= 0:
        raise DomainError(f"identity needs H^2 + c > 0, got H={H}, c={c} (n={n})")
    ra = ring_alpha(ctx, H)
    if ra < 0:
        raise DomainError(f"ring_alpha = {ra} < 0 at (n={n}, H={H}, c={c})")
    lhs = (n - 2) * math.sqrt(n / (n - 1) * H * H * ra)
    rhs = n * (H * H + c) - ra
    if rhs < -1e-12 * max(1.0, abs(ra)):
        raise DomainError(f"n(H^2+c) - ring_alpha = {rhs} < 0 at (n={n}, H={H}, c={c})")
    return lhs, rhs, ra


def lemma3_residual(ctx, H: float) -> float:
    """(n-2) sqrt(n/(n-1) H^2 ring_alpha) - (n(H^2+c) - ring_alpha); zero up to rounding."""
    lhs, rhs, _ = _lemma3_sides(_as_ctx(ctx), H)
    return lhs - rhs


def lemma3_relative_residual(ctx, H: float) -> float:
    lhs, rhs, _ = _lemma3_sides(_as_ctx(ctx), H)
    return abs(lhs - rhs) / max(1.0, rhs)


def ring_alpha_by_bisection(ctx, H: float, xtol: float = 1e-14, rtol: float = 1e-15) -> float:
    """Independent root oracle for ring_alpha.

    Solves n(H^2+c) - x = (n-2) sqrt(n/(n-1) H^2 x) on [0, n(H^2+c)]; the left
    side minus the right is strictly decreasing there, so the root is unique
    and equals the smaller root of the squared quadratic.
    """
    ctx = _as_ctx(ctx)
    n, c = ctx.n, ctx.c
    top = n * (H * H + c)
    if top <= 0:
        raise DomainError(f"need H^2 + c > 0, got H={H}, c={c}")
    coef = (n - 2) * math.sqrt(n / (n - 1)) * abs(H)

    def g(x):
        return top - x - coef * math.sqrt(x)

    if g(0.0) == 0.0:
        return 0.0
    if g(top) == 0.0:
        return top
    return bisect(g, 0.0, top, xtol=xtol, rtol=rtol, maxiter=400)


def problem_gap_check(n: int, H: float) -> float:
    """Margin (2n + 3nH^2) - alpha_{floor(n/2)}(n, H); positive for every n >= 4."""
    if n < 4:
        raise UsageError(f"n must be >= 4, got {n}")
    return 2 * n + 3 * n * H * H - alpha_k(n, H, n // 2)


def pinching_profile(ctx, H: float) -> PinchingProfile:
    ctx = _as_ctx(ctx)
    ctx.require_theorem_range()
    n = ctx.n
    a = alpha_general(ctx, H)
    return PinchingProfile(
        n=n,
        H=H,
        c=ctx.c,
        alpha=a,
        ring_alpha=a - n * H * H,
        beta=beta(n, H),
        alpha_k=tuple(alpha_k(n, H, k) for k in range(1, n)),
        b_n=b_n(n),
        delta=delta_band(ctx, H),
        lambda_k=tuple(lambda_k(n, H, k) for k in range(1, n)),
    )
