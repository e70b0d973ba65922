"""The trace-free spectrum manifold {sum mu = 0, sum mu^2 = 1} and its functionals.

A spectrum is the sorted vector mu_1 <= ... <= mu_n of normalized
trace-free principal curvatures.  On it we evaluate

    phi   = sum mu_i^3 + (n-2)/sqrt(n(n-1))
    eta   = sqrt(n/(n-1)) mu_1 + 1
    sigma = [sum_{i>=2} (mu_i + mu_1/(n-1))^2]^(1/2)

All three vanish exactly on the two-valued spectrum whose bottom value has
multiplicity one (``extremal_spectrum``).  The ``*_batch`` helpers take
arrays of shape (m, n) with sorted rows and are used by the sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import b_n
from .errors import DegenerateInputError, UsageError

# mu_2 - mu_1 threshold factor in the lemma2 gap conclusion, and the sharper
# case-(i) factor shown for n <= 20.
GAP_FACTOR = 2.0 / (3.0 - 3.0**-9)
CASE_I_GAP_FACTOR = 0.667
ETA_BOUND = 0.0445
SIGMA_BOUND = 0.295
ETA_BOUND_LARGE_N = 0.04305
SIGMA_BOUND_LARGE_N = 0.29026

INVARIANT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TraceFreeSpectrum:
    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.ndim != 1 or mu.size < 3:
            raise UsageError(f"a spectrum needs a 1-d vector of length >= 3, got shape {mu.shape}")
        if abs(mu.sum()) >= INVARIANT_TOL or abs(mu @ mu - 1.0) >= INVARIANT_TOL:
            raise DegenerateInputError("vector is not on the trace-free unit sphere; use make_spectrum")
        if np.any(np.diff(mu) < 0):
            raise UsageError("spectrum must be sorted ascending; use make_spectrum")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return self.mu.size

    def __len__(self):
        return self.mu.size

    def __repr__(self):
        return f"TraceFreeSpectrum({np.array2string(self.mu, precision=6)})"


class SpectrumFunctionals(NamedTuple):
    phi: float
    eta: float
    sigma: float


class Lemma1Margins(NamedTuple):
    m1a: float  # sqrt(n(n-1))/(n-2) phi - eta
    m1b: float  # eta - sigma^2/2
    m2: float  # sqrt(n(n-1)) phi - eta [3n - 3(n+1) eta - 2 sqrt(n(n-1)) sigma]


class Lemma2Conclusions(NamedTuple):
    eta_ok: bool
    sigma_ok: bool
    gap_ok: bool
    gap_margin: float


def canonicalize(raw) -> np.ndarray:
    """Project rows onto sum = 0, scale to unit norm, sort ascending."""
    x = np.asarray(raw, dtype=float)
    x = x - x.mean(axis=-1, keepdims=True)
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    scale = np.sqrt(x.shape[-1]) * np.max(np.abs(np.asarray(raw, dtype=float)), axis=-1, keepdims=True)
    if np.any(norm <= 1e-14 * np.maximum(scale, 1e-300)):
        raise DegenerateInputError("input is proportional to the all-ones vector (zero trace-free part)")
    x = np.sort(x / norm, axis=-1)
    # a second centring pass removes the rounding left by the first
    x = x - x.mean(axis=-1, keepdims=True)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def make_spectrum(raw) -> TraceFreeSpectrum:
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 1 or raw.size < 3:
        raise UsageError(f"need a vector of n >= 3 reals, got shape {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise UsageError("spectrum entries must be finite")
    return TraceFreeSpectrum(canonicalize(raw))


def two_valued_spectrum(n: int, k: int) -> TraceFreeSpectrum:
    """k copies of the low value and n-k copies of the high value."""
    if not 1 <= k <= n - 1:
        raise UsageError(f"k must lie in [1, {n - 1}], got {k}")
    lo = -math.sqrt((n - k) / (n * k))
    hi = math.sqrt(k / (n * (n - k)))
    return make_spectrum([lo] * k + [hi] * (n - k))


def extremal_spectrum(n: int) -> TraceFreeSpectrum:
    return two_valued_spectrum(n, 1)


# -- vectorized kernels -----------------------------------------------------


def functionals_batch(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mu = np.atleast_2d(mu)
    n = mu.shape[-1]
    mu1 = mu[..., 0]
    phi = (mu**3).sum(axis=-1) + (n - 2) / math.sqrt(n * (n - 1))
    eta = math.sqrt(n / (n - 1)) * mu1 + 1.0
    sigma = np.sqrt(((mu[..., 1:] + mu1[..., None] / (n - 1)) ** 2).sum(axis=-1))
    return phi, eta, sigma


def lemma1_margins_batch(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = np.atleast_2d(mu).shape[-1]
    r = math.sqrt(n * (n - 1))
    phi, eta, sigma = functionals_batch(mu)
    m1a = r / (n - 2) * phi - eta
    m1b = eta - sigma**2 / 2
    m2 = r * phi - eta * (3 * n - 3 * (n + 1) * eta - 2 * r * sigma)
    return m1a, m1b, m2


def phi_decomposition_residual_batch(mu: np.ndarray) -> np.ndarray:
    mu = np.atleast_2d(mu)
    n = mu.shape[-1]
    mu1 = mu[..., :1]
    lhs = ((mu + mu1 / (n - 1)) ** 2 * (mu - mu1)).sum(axis=-1)
    phi, eta, sigma = functionals_batch(mu)
    rhs = phi - (n - 2) / math.sqrt(n * (n - 1)) * eta + mu1[..., 0] / (n - 1) * sigma**2
    return lhs - rhs


def phi_chain_margin_batch(mu: np.ndarray) -> np.ndarray:
    """phi - [(n-2)/sqrt(n(n-1)) eta + sigma^2 (mu_2 - n/(n-1) mu_1)] (nonnegative)."""
    mu = np.atleast_2d(mu)
    n = mu.shape[-1]
    phi, eta, sigma = functionals_batch(mu)
    bound = (n - 2) / math.sqrt(n * (n - 1)) * eta + sigma**2 * (mu[..., 1] - n / (n - 1) * mu[..., 0])
    return phi - bound


def gap_chain_margins_batch(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two steps of the lower bound on mu_2 - mu_1.

    First: (mu_2 - mu_1) - [sqrt(n/(n-1))(1 - eta) - sigma], valid for all n.
    Second: [sqrt(n/(n-1))(1 - eta) - sigma] - sqrt(n/(n-1))(1 - eta - sqrt(19/20) sigma),
    nonnegative only for n <= 20.
    """
    mu = np.atleast_2d(mu)
    n = mu.shape[-1]
    a = math.sqrt(n / (n - 1))
    _, eta, sigma = functionals_batch(mu)
    mid = a * (1 - eta) - sigma
    low = a * (1 - eta - math.sqrt(19 / 20) * sigma)
    return (mu[..., 1] - mu[..., 0]) - mid, mid - low


def two_n_eta_margin_batch(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sqrt(n(n-1)) phi - 2 n eta, with the mask 3 eta + 2 sigma < 3/4 where it must hold."""
    mu = np.atleast_2d(mu)
    n = mu.shape[-1]
    phi, eta, sigma = functionals_batch(mu)
    return math.sqrt(n * (n - 1)) * phi - 2 * n * eta, 3 * eta + 2 * sigma < 0.75


# -- single-spectrum API -----------------------------------------------------


def functionals(s: TraceFreeSpectrum) -> SpectrumFunctionals:
    phi, eta, sigma = functionals_batch(s.mu)
    return SpectrumFunctionals(float(phi[0]), float(eta[0]), float(sigma[0]))


def lemma1_margins(s: TraceFreeSpectrum) -> Lemma1Margins:
    if s.n < 3:
        raise UsageError("lemma1 margins need n >= 3")
    m1a, m1b, m2 = lemma1_margins_batch(s.mu)
    return Lemma1Margins(float(m1a[0]), float(m1b[0]), float(m2[0]))


def phi_decomposition_residual(s: TraceFreeSpectrum) -> float:
    return float(phi_decomposition_residual_batch(s.mu)[0])


def lemma2_threshold(n: int) -> float:
    """Upper bound (B_n/2) sqrt(n/(n-1)) on phi in the lemma2 hypothesis."""
    return b_n(n) / 2 * math.sqrt(n / (n - 1))


def lemma2_hypothesis(s: TraceFreeSpectrum, n: int | None = None) -> bool:
    n = _check_n(s, n)
    return functionals(s).phi <= lemma2_threshold(n)


def lemma2_conclusions(s: TraceFreeSpectrum, n: int | None = None) -> Lemma2Conclusions:
    n = _check_n(s, n)
    f = functionals(s)
    if f.phi > lemma2_threshold(n):
        raise UsageError(
            f"lemma2 hypothesis fails: phi={f.phi:.6g} > {lemma2_threshold(n):.6g}"
        )
    gap_margin = float(s.mu[1] - s.mu[0]) - GAP_FACTOR * math.sqrt(n / (n - 1))
    return Lemma2Conclusions(f.eta < ETA_BOUND, f.sigma < SIGMA_BOUND, gap_margin > 0, gap_margin)


def _check_n(s: TraceFreeSpectrum, n: int | None) -> int:
    if n is None:
        n = s.n
    if n != s.n:
        raise UsageError(f"n={n} does not match spectrum length {s.n}")
    if n < 4:
        raise UsageError(f"lemma2 needs n >= 4, got {n}")
    return n
