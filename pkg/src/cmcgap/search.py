"""Multi-start falsification search over the trace-free spectrum manifold.

Each start is a standard-normal n-vector pushed onto {sum = 0, |mu| = 1}.
From there a projected descent minimizes one margin: the Euclidean
gradient is projected onto the tangent space (orthogonal to 1 and to mu),
normalized, and a step of length t is retracted back onto the manifold.
Accepted steps strictly decrease the objective; a rejected step halves t.
The run stops at t < min_step or after max_iter iterations.

Margins that carry the lemma2 hypothesis phi <= thr as a constraint use
an exact penalty, margin + PENALTY * max(0, phi - thr).  Only iterates that
satisfy the hypothesis contribute to the reported worst margin.

Randomness is drawn in fixed-size blocks; block b uses the generator
seeded with (seed, b).  A block is the unit of work for the process pool,
so the report does not depend on the worker count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from numba import njit

from .errors import UsageError
from .report import VerificationReport
from .spectrum import (
    ETA_BOUND,
    GAP_FACTOR,
    SIGMA_BOUND,
    canonicalize,
    lemma2_threshold,
    make_spectrum,
    two_valued_spectrum,
)

PENALTY = 1e4
DEFAULT_STEP = 0.1
DEFAULT_MAX_ITER = 200
DEFAULT_MIN_STEP = 1e-12
BLOCK_SIZE = 1024
MARGIN_TOL = 1e-9


class Objective(str, enum.Enum):
    LEMMA1_LEFT = "lemma1_left"
    LEMMA1_RIGHT = "lemma1_right"
    LEMMA1_II = "lemma1_ii"
    LEMMA2_ETA = "lemma2_eta"
    LEMMA2_SIGMA = "lemma2_sigma"
    LEMMA2_GAP = "lemma2_gap"

    @property
    def code(self) -> int:
        return _CODES[self]

    @property
    def constrained(self) -> bool:
        return self.code >= 3

    @property
    def min_n(self) -> int:
        return 4 if self.constrained else 3


_CODES = {obj: i for i, obj in enumerate(Objective)}
LEMMA1_OBJECTIVES = (Objective.LEMMA1_LEFT, Objective.LEMMA1_RIGHT, Objective.LEMMA1_II)
LEMMA2_OBJECTIVES = (Objective.LEMMA2_ETA, Objective.LEMMA2_SIGMA, Objective.LEMMA2_GAP)


@njit(cache=True)
def _evaluate(x, code, thr, penalty, g):
    """Return (objective, raw margin, feasible) at x and write the gradient into g."""
    n = x.size
    r = math.sqrt(n * (n - 1.0))
    a = math.sqrt(n / (n - 1.0))
    i1 = 0
    for i in range(1, n):
        if x[i] < x[i1]:
            i1 = i
    i2 = 1 if i1 == 0 else 0
    for i in range(n):
        if i != i1 and x[i] < x[i2]:
            i2 = i
    x1 = x[i1]
    phi = (n - 2.0) / r
    for i in range(n):
        phi += x[i] * x[i] * x[i]
    eta = a * x1 + 1.0
    s2 = 0.0
    acc = 0.0
    for i in range(n):
        if i != i1:
            v = x[i] + x1 / (n - 1.0)
            s2 += v * v
            acc += v
    sigma = math.sqrt(s2)
    for i in range(n):
        g[i] = 0.0

    # gradient of sigma^2; sigma itself is differentiable only off sigma = 0
    # and we use a zero subgradient there
    inv_s = 1.0 / sigma if sigma > 1e-300 else 0.0

    if code == 0:
        c = r / (n - 2.0)
        raw = c * phi - eta
        for i in range(n):
            g[i] = 3.0 * c * x[i] * x[i]
        g[i1] -= a
    elif code == 1:
        raw = eta - 0.5 * s2
        for i in range(n):
            if i != i1:
                g[i] -= x[i] + x1 / (n - 1.0)
        g[i1] += a - acc / (n - 1.0)
    elif code == 2:
        bracket = 3.0 * n - 3.0 * (n + 1.0) * eta - 2.0 * r * sigma
        raw = r * phi - eta * bracket
        d_eta = -(bracket - 3.0 * (n + 1.0) * eta)
        d_sigma = 2.0 * r * eta
        for i in range(n):
            g[i] = 3.0 * r * x[i] * x[i]
            if i != i1:
                g[i] += d_sigma * (x[i] + x1 / (n - 1.0)) * inv_s
        g[i1] += d_eta * a + d_sigma * acc / (n - 1.0) * inv_s
    elif code == 3:
        raw = ETA_BOUND - eta
        g[i1] = -a
    elif code == 4:
        raw = SIGMA_BOUND - sigma
        for i in range(n):
            if i != i1:
                g[i] = -(x[i] + x1 / (n - 1.0)) * inv_s
        g[i1] = -acc / (n - 1.0) * inv_s
    else:
        raw = (x[i2] - x1) - GAP_FACTOR * a
        g[i2] = 1.0
        g[i1] = -1.0

    feasible = True
    obj = raw
    if code >= 3:
        viol = phi - thr
        if viol > 0.0:
            feasible = False
            obj += penalty * viol
            for i in range(n):
                g[i] += 3.0 * penalty * x[i] * x[i]
    return obj, raw, feasible


@njit(cache=True)
def _retract(y):
    n = y.size
    m = 0.0
    for i in range(n):
        m += y[i]
    m /= n
    s = 0.0
    for i in range(n):
        y[i] -= m
        s += y[i] * y[i]
    s = math.sqrt(s)
    for i in range(n):
        y[i] /= s


@njit(cache=True)
def _descend(x, code, thr, penalty, step, max_iter, min_step, best_x, trace):
    """Descend in place from x.

    Returns (best feasible raw margin, number of trace entries).  best_x holds
    the iterate attaining that margin; trace holds accepted objective values.
    """
    n = x.size
    g = np.empty(n)
    gy = np.empty(n)
    d = np.empty(n)
    y = np.empty(n)
    f, raw, feas = _evaluate(x, code, thr, penalty, g)
    best = np.inf
    if feas:
        best = raw
        best_x[:] = x
    ntrace = 0
    if trace.size > 0:
        trace[0] = f
        ntrace = 1
    t = step
    for _ in range(max_iter):
        if t < min_step:
            break
        m = 0.0
        for i in range(n):
            m += g[i]
        m /= n
        dot = 0.0
        for i in range(n):
            d[i] = g[i] - m
            dot += d[i] * x[i]
        nrm = 0.0
        for i in range(n):
            d[i] -= dot * x[i]
            nrm += d[i] * d[i]
        nrm = math.sqrt(nrm)
        if nrm < 1e-15:
            break
        for i in range(n):
            y[i] = x[i] - t * d[i] / nrm
        _retract(y)
        fy, rawy, feasy = _evaluate(y, code, thr, penalty, gy)
        if fy < f:
            f = fy
            for i in range(n):
                x[i] = y[i]
                g[i] = gy[i]
            if ntrace < trace.size:
                trace[ntrace] = f
                ntrace += 1
            if feasy and rawy < best:
                best = rawy
                best_x[:] = x
        else:
            t *= 0.5
    return best, ntrace


@njit(cache=True)
def _search_block(X, code, thr, penalty, step, max_iter, min_step):
    m, n = X.shape
    best = np.inf
    best_x = np.zeros(n)
    cand = np.empty(n)
    trace = np.empty(0)
    n_feasible = 0
    for b in range(m):
        val, _ = _descend(X[b], code, thr, penalty, step, max_iter, min_step, cand, trace)
        if val < np.inf:
            n_feasible += 1
        if val < best:
            best = val
            best_x[:] = cand
    return best, best_x, n_feasible


def _block_starts(n: int, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.default_rng([seed, block])
    return canonicalize(rng.standard_normal((size, n)))


def _run_block(args):
    n, seed, block, size, code, thr, step, max_iter, min_step = args
    X = _block_starts(n, seed, block, size)
    return _search_block(X, code, thr, PENALTY, step, max_iter, min_step)


def stratified_starts(n: int) -> np.ndarray:
    """Two-valued spectra with k low entries, k = 1..n-1 (the equality cases)."""
    return np.stack([two_valued_spectrum(n, k).mu for k in range(1, n)])


def descent_trace(s, objective, step=DEFAULT_STEP, max_iter=DEFAULT_MAX_ITER, min_step=DEFAULT_MIN_STEP):
    """Run one descent from spectrum s; return (accepted objective values, final spectrum)."""
    objective = Objective(objective)
    n = s.n
    thr = lemma2_threshold(n) if objective.constrained else 0.0
    x = np.array(s.mu, dtype=float)
    trace = np.empty(max_iter + 1)
    best_x = np.zeros(n)
    _, k = _descend(x, objective.code, thr, PENALTY, step, max_iter, min_step, best_x, trace)
    return trace[:k].copy(), make_spectrum(x)


def counterexample_search(
    n: int,
    objective,
    samples: int,
    seed: int = 0,
    *,
    step: float = DEFAULT_STEP,
    max_iter: int = DEFAULT_MAX_ITER,
    min_step: float = DEFAULT_MIN_STEP,
    stratified: bool = True,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
    tol: float = MARGIN_TOL,
) -> VerificationReport:
    """Search for a spectrum that drives the selected margin below zero.

    ``samples`` random starts are drawn (plus the n-1 two-valued spectra when
    ``stratified``).  The report's worst_margin is the lowest margin seen on
    any accepted, hypothesis-feasible iterate.
    """
    objective = Objective(objective)
    if n < objective.min_n:
        raise UsageError(f"{objective.value} needs n >= {objective.min_n}, got {n}")
    if samples < 0 or (samples == 0 and not stratified):
        raise UsageError(f"samples must be >= 1, got {samples}")
    if seed < 0:
        raise UsageError(f"seed must be a nonnegative integer, got {seed}")
    thr = lemma2_threshold(n) if objective.constrained else 0.0
    code = objective.code

    results = []
    if stratified:
        results.append(_search_block(stratified_starts(n), code, thr, PENALTY, step, max_iter, min_step))
    nblocks = -(-samples // block_size)
    jobs = [
        (n, seed, b, min(block_size, samples - b * block_size), code, thr, step, max_iter, min_step)
        for b in range(nblocks)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results.extend(pool.map(_run_block, jobs))
    else:
        results.extend(_run_block(job) for job in jobs)

    worst, witness, n_feasible = math.inf, None, 0
    for best, best_x, nf in results:
        n_feasible += nf
        if best < worst:
            worst, witness = best, best_x
    total = samples + (n - 1 if stratified else 0)
    details = {
        "n": n,
        "objective": objective.value,
        "feasible_starts": n_feasible,
        "step": step,
        "max_iter": max_iter,
        "stratified": stratified,
    }
    if objective.constrained:
        details["phi_threshold"] = thr
    return VerificationReport(
        check_id=f"{objective.value}[n={n}]",
        worst_margin=worst,
        witness=make_spectrum(witness) if witness is not None else None,
        samples=total,
        seed=seed,
        tol=tol,
        details=details,
    )
