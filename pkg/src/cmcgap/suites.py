"""Verification suites: grids and searches that turn each lemma into VerificationReports."""

from __future__ import annotations

import math

import numpy as np

from . import constants as pc
from . import envelope as env
from . import gap
from .report import VerificationReport
from .search import LEMMA1_OBJECTIVES, LEMMA2_OBJECTIVES, counterexample_search
from .spectrum import (
    ETA_BOUND,
    ETA_BOUND_LARGE_N,
    SIGMA_BOUND,
    SIGMA_BOUND_LARGE_N,
    canonicalize,
    functionals_batch,
    gap_chain_margins_batch,
    lemma2_conclusions,
    lemma2_hypothesis,
    phi_chain_margin_batch,
    phi_decomposition_residual_batch,
    two_n_eta_margin_batch,
)

IDENTITY_TOL = 1e-10
MARGIN_TOL = 1e-9

LEMMA3_NS = tuple(range(4, 51))
LEMMA3_HS = tuple(round(0.1 * i, 10) for i in range(1, 101))
LEMMA3_CS = (-0.5, 0.0, 1.0)
ORDERING_NS = tuple(range(4, 31))
ORDERING_HS = (0.01, 0.1, 1.0, 10.0)
CLIFFORD_HS = (0.1, 0.5, 1.0, 2.0)
PROBLEM_HS = tuple(round(0.05 * i, 10) for i in range(1, 41))
LEMMA1_NS = (4, 5, 10, 20, 21, 50)
LEMMA2_NS = (4, 10, 20, 21, 50)
BAND_NS = tuple(range(4, 31))
BAND_HS = (0.1, 1.0, 2.0)
BAND_CS = (-0.5, 0.0, 1.0)
IDENTITY_NS = tuple(range(3, 31))

SUITES = ("lemma1", "lemma2", "lemma3", "envelope", "band", "identities")


def _admissible(H, c):
    return H * H + c > 0


# -- lemma3 ------------------------------------------------------------------


def lemma3_suite(ns=LEMMA3_NS, Hs=LEMMA3_HS, cs=LEMMA3_CS) -> list[VerificationReport]:
    worst_res, at_res = 0.0, None
    worst_root, at_root = 0.0, None
    worst_spec, at_spec = 0.0, None
    branch_pos, at_pos = math.inf, None
    branch_neg, at_neg = math.inf, None
    points = 0
    for n in ns:
        for H in Hs:
            for c in cs:
                if not _admissible(H, c):
                    continue
                points += 1
                ctx = pc.SpaceFormContext(n, c)
                r = pc.lemma3_relative_residual(ctx, H)
                if r > worst_res:
                    worst_res, at_res = r, (n, H, c)
                ra = pc.ring_alpha(ctx, H)
                err = abs(ra - pc.ring_alpha_by_bisection(ctx, H)) / max(1.0, ra)
                if err > worst_root:
                    worst_root, at_root = err, (n, H, c)
                q = n * H * H / (n - 1)
                if c > 0 and H > 0:
                    m = ra - q  # must be > 0
                    if m < branch_pos:
                        branch_pos, at_pos = m, (n, H, c)
                elif c <= 0:
                    m = (q - ra) / max(1.0, q)  # must be >= 0
                    if m < branch_neg:
                        branch_neg, at_neg = m, (n, H, c)
            if 1.0 in cs:
                s = abs(pc.alpha_general((n, 1.0), H) - pc.alpha_k(n, H, 1)) / max(1.0, pc.alpha_k(n, H, 1))
                if s > worst_spec:
                    worst_spec, at_spec = s, (n, H)
    reports = [
        VerificationReport("lemma3_identity", -worst_res, tol=IDENTITY_TOL, samples=points,
                           details={"max_relative_residual": worst_res, "at": at_res}),
        VerificationReport("lemma3_root_oracle", -worst_root, tol=1e-12, samples=points,
                           details={"max_relative_error": worst_root, "at": at_root}),
        VerificationReport("alpha_specialization_c1", -worst_spec, tol=1e-12, samples=len(ns) * len(Hs),
                           details={"max_relative_error": worst_spec, "at": at_spec}),
    ]
    if at_pos is not None:
        r = VerificationReport("delta_branch_c_positive", branch_pos, tol=0.0, samples=points,
                               details={"claim": "nH^2/(n-1) < ring_alpha", "at": at_pos})
        r.passed = branch_pos > 0
        reports.append(r)
    if at_neg is not None:
        # equality holds identically at c = 0, so the margin is relative and rounding needs slack
        reports.append(VerificationReport("delta_branch_c_nonpositive", branch_neg, tol=1e-10, samples=points,
                                          details={"claim": "nH^2/(n-1) >= ring_alpha", "at": at_neg}))
    return reports


# -- identities --------------------------------------------------------------


def ordering_report(ns=ORDERING_NS, Hs=ORDERING_HS) -> VerificationReport:
    worst, at = math.inf, None
    for n in ns:
        for H in Hs:
            vals = np.array([pc.alpha_k(n, H, k) for k in range(1, n)])
            d = np.diff(vals)
            i = int(np.argmin(d))
            if d[i] < worst:
                worst, at = float(d[i]), (n, H, i + 1)
            ends = abs(vals[0] - pc.alpha_general((n, 1.0), H)) + abs(vals[-1] - pc.beta(n, H))
            if ends > 1e-9 * max(1.0, vals[-1]):
                worst, at = -ends, (n, H, "endpoints")
    r = VerificationReport("alpha_k_ordering", worst - 1e-9, tol=0.0, samples=len(ns) * len(Hs),
                           details={"min_adjacent_difference": worst, "at": at})
    r.passed = worst > 1e-9
    return r


def clifford_report(ns=ORDERING_NS, Hs=CLIFFORD_HS) -> VerificationReport:
    """Models S^{n-k} x S^k built from lambda_k reproduce H and alpha_k."""
    worst_h = worst_s = score = 0.0
    at = None
    count = 0
    for n in ns:
        for H in Hs:
            for k in range(1, n):
                m = gap.clifford_model(n, k, pc.lambda_k(n, H, k))
                eh = abs(m.H - H)
                es = abs(m.S - pc.alpha_k(n, H, k)) / m.S
                count += 1
                worst_h, worst_s = max(worst_h, eh), max(worst_s, es)
                if max(eh / 1e-9, es / 1e-8) > score:
                    score, at = max(eh / 1e-9, es / 1e-8), (n, H, k)
    # scaled so the report passes iff |dH| <= 1e-9 and |dS|/S <= 1e-8
    return VerificationReport("clifford_realization", -score, tol=1.0, samples=count,
                              details={"max_H_error": worst_h, "max_rel_S_error": worst_s, "at": at})


def problem_report(ns=ORDERING_NS, Hs=PROBLEM_HS) -> VerificationReport:
    worst, at = math.inf, None
    for n in ns:
        for H in Hs:
            m = pc.problem_gap_check(n, H)
            if m < worst:
                worst, at = m, (n, H)
    r = VerificationReport("half_index_alpha_bound", worst, tol=0.0, samples=len(ns) * len(Hs),
                           details={"claim": "alpha_[n/2] < 2n + 3nH^2", "at": at})
    r.passed = worst > 0
    return r


def random_spectra(n: int, samples: int, seed: int) -> np.ndarray:
    return canonicalize(np.random.default_rng([seed, n]).standard_normal((samples, n)))


def spectrum_identity_reports(ns=IDENTITY_NS, samples: int = 10_000, seed: int = 0) -> list[VerificationReport]:
    """Exact identities (worst |residual|) and proof inequalities (worst margin) on random spectra."""
    residuals = {"sigma_identity": (0.0, None), "phi_decomposition": (0.0, None)}
    margins = {
        "phi_chain": (math.inf, None),
        "gap_chain_general": (math.inf, None),
        "gap_chain_n_le_20": (math.inf, None),
        "two_n_eta_chain": (math.inf, None),
    }

    def track_residual(key, values, mu):
        i = int(np.argmax(np.abs(values)))
        if abs(values[i]) > residuals[key][0]:
            residuals[key] = (float(abs(values[i])), mu[i])

    def track_margin(key, values, mu):
        if values.size == 0:
            return
        i = int(np.argmin(values))
        if values[i] < margins[key][0]:
            margins[key] = (float(values[i]), mu[i])

    total = 0
    for n in ns:
        mu = random_spectra(n, samples, seed)
        total += samples
        _, eta, sigma = functionals_batch(mu)
        track_residual("sigma_identity", sigma**2 - eta * (2 - eta), mu)
        track_residual("phi_decomposition", phi_decomposition_residual_batch(mu), mu)
        track_margin("phi_chain", phi_chain_margin_batch(mu), mu)
        first, second = gap_chain_margins_batch(mu)
        track_margin("gap_chain_general", first, mu)
        if n <= 20:
            track_margin("gap_chain_n_le_20", second, mu)
        m, mask = two_n_eta_margin_batch(mu)
        track_margin("two_n_eta_chain", m[mask], mu[mask])

    reports = [
        VerificationReport(key, -val, tol=IDENTITY_TOL, witness=wit, samples=total, seed=seed)
        for key, (val, wit) in residuals.items()
    ]
    reports += [
        VerificationReport(key, val, tol=MARGIN_TOL, witness=wit, samples=total, seed=seed)
        for key, (val, wit) in margins.items()
    ]
    return reports


def muenzner_report() -> VerificationReport:
    errs = [
        abs(gap.muenzner_s(n, 2) - gap.clifford_model(n, n // 2, 1.0).S)
        for n in range(4, 31, 2)
    ]
    errs += [abs(gap.muenzner_s(n, 3) - (2 * n + 3 * n * 0.0)) for n in (6, 12, 24)]
    return VerificationReport("muenzner_consistency", -max(errs), tol=1e-12, samples=len(errs))


def identities_suite(samples: int = 10_000, seed: int = 0) -> list[VerificationReport]:
    return [
        *spectrum_identity_reports(samples=samples, seed=seed),
        ordering_report(),
        clifford_report(),
        problem_report(),
        muenzner_report(),
    ]


# -- searches ----------------------------------------------------------------


def lemma1_suite(ns=LEMMA1_NS, samples: int = 10_000, seed: int = 0, workers: int = 1) -> list[VerificationReport]:
    return [
        counterexample_search(n, obj, samples, seed, workers=workers)
        for n in ns
        for obj in LEMMA1_OBJECTIVES
    ]


def model_link_report(ns=LEMMA2_NS, Hs=CLIFFORD_HS, cs=(1.0, 0.0, -0.5)) -> VerificationReport:
    """Boundary models give hypothesis-satisfying spectra whose conclusions hold strictly."""
    worst, at, count = math.inf, None, 0
    for n in ns:
        for H in Hs:
            for c in cs:
                if not _admissible(H, c):
                    continue
                s = gap.spectrum_of_model(gap.boundary_model(n, H, c))
                count += 1
                if not lemma2_hypothesis(s):
                    worst, at = -math.inf, (n, H, c)
                    continue
                concl = lemma2_conclusions(s)
                f = functionals_batch(s.mu)
                m = min(ETA_BOUND - f[1][0], SIGMA_BOUND - f[2][0], concl.gap_margin)
                if m < worst:
                    worst, at = float(m), (n, H, c)
    r = VerificationReport("boundary_model_lemma2", worst, tol=0.0, samples=count, details={"at": at})
    r.passed = worst > 0
    return r


def lemma2_suite(ns=LEMMA2_NS, samples: int = 10_000, seed: int = 0, workers: int = 1) -> list[VerificationReport]:
    reports = []
    for n in ns:
        for obj in LEMMA2_OBJECTIVES:
            r = counterexample_search(n, obj, samples, seed, workers=workers)
            if r.witness is not None:
                _, eta, sigma = functionals_batch(r.witness.mu)
                r.details["witness_eta"] = float(eta[0])
                r.details["witness_sigma"] = float(sigma[0])
            reports.append(r)
    reports.append(model_link_report(ns))
    return reports


# -- envelope ----------------------------------------------------------------


def envelope_suite(grid: int = 10_000) -> list[VerificationReport]:
    reports = [env.certify_case(case, grid) for case in (env.SMALL_N, env.LARGE_N)]
    floors = [
        (env.envelope_small(0.0445), 0.1),
        (env.envelope_small(0.2), 0.1),
        (env.envelope_large(0.04305), 0.098),
        (env.envelope_large(0.11), 0.098),
    ]
    m = min(v - f for v, f in floors)
    r = VerificationReport("envelope_floor_strictness", m - 1e-5, tol=0.0, samples=4,
                           details={"values": [v for v, _ in floors]})
    r.passed = m > 1e-5
    reports.append(r)
    sig = [
        (math.sqrt(0.0445 * (2 - 0.0445)), SIGMA_BOUND),
        (math.sqrt(ETA_BOUND_LARGE_N * (2 - ETA_BOUND_LARGE_N)), SIGMA_BOUND_LARGE_N),
    ]
    m = min(b - s for s, b in sig)
    r = VerificationReport("sigma_threshold_propagation", m, tol=0.0, samples=2,
                           details={"sigma_values": [s for s, _ in sig], "margins": [b - s for s, b in sig]})
    r.passed = m > 0
    reports.append(r)
    caps = [env.eta_cap_check(n) for n in range(4, 201)]
    reports.append(VerificationReport("eta_cap", 0.0, tol=0.0, samples=len(caps),
                                      details={"max_cap_small": max(caps[:17]), "max_cap_large": max(caps[17:])}))
    return reports


# -- band --------------------------------------------------------------------


def band_suite(ns=BAND_NS, Hs=BAND_HS, cs=BAND_CS, grid: int = 1000) -> list[VerificationReport]:
    worst_phi, at_phi = math.inf, None
    worst_eta, at_eta = math.inf, None
    worst_bal, at_bal = 0.0, None
    min_delta, at_delta = math.inf, None
    points = 0
    for n in ns:
        for H in Hs:
            for c in cs:
                if not _admissible(H, c):
                    continue
                points += 1
                mp, me = gap.band_margins(n, H, c, grid)
                if mp < worst_phi:
                    worst_phi, at_phi = mp, (n, H, c)
                if me < worst_eta:
                    worst_eta, at_eta = me, (n, H, c)
                ra = pc.ring_alpha((n, c), H)
                bal = abs(gap.simons_rhs(n, H, c, ra)) / max(1.0, ra * n * (H * H + abs(c)))
                if bal > worst_bal:
                    worst_bal, at_bal = bal, (n, H, c)
                d = pc.delta_band((n, c), H)
                if d < min_delta:
                    min_delta, at_delta = d, (n, H, c)
    reports = [
        VerificationReport("band_phi_bound", worst_phi, tol=MARGIN_TOL, samples=points * grid,
                           details={"claim": "lhs <= rhs", "at": at_phi}),
        VerificationReport("band_eta_coefficient", worst_eta, tol=MARGIN_TOL, samples=points * grid,
                           details={"claim": "value >= floor", "at": at_eta}),
        VerificationReport("simons_balance_at_boundary", -worst_bal, tol=1e-9, samples=points,
                           details={"max_relative_rhs": worst_bal, "at": at_bal}),
    ]
    r = VerificationReport("band_nonempty", min_delta, tol=0.0, samples=points, details={"at": at_delta})
    r.passed = min_delta > 0
    reports.append(r)
    reports.append(classification_report())
    return reports


CLASSIFY_CONTRACT = (
    (7.0, gap.GapTag.SUBCRITICAL),
    (7.61133, gap.GapTag.RIGID_BOUNDARY),
    (7.7, gap.GapTag.FORBIDDEN_BAND),
    (12.0, gap.GapTag.ABOVE),
)


def classification_report() -> VerificationReport:
    bad = [S for S, tag in CLASSIFY_CONTRACT if gap.classify(4, 1.0, 1.0, S).tag is not tag]
    lo, hi = gap.classify(4, 1.0, 1.0, 7.0).band
    err = max(abs(lo - 7.61133), abs(hi - 7.87800))
    margin = -err if not bad else -math.inf
    return VerificationReport("classification_contract", margin, tol=1e-4, samples=len(CLASSIFY_CONTRACT),
                              details={"band": [lo, hi], "mismatched_S": bad})


def run_suite(name: str, *, samples: int = 10_000, seed: int = 0, grid: int | None = None,
              ns=None, workers: int = 1) -> list[VerificationReport]:
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, samples=samples, seed=seed, grid=grid, ns=ns, workers=workers))
        return out
    if name == "lemma1":
        return lemma1_suite(ns or LEMMA1_NS, samples, seed, workers)
    if name == "lemma2":
        return lemma2_suite(ns or LEMMA2_NS, samples, seed, workers)
    if name == "lemma3":
        return lemma3_suite()
    if name == "envelope":
        return envelope_suite(grid or 10_000)
    if name == "band":
        return band_suite(grid=grid or 1000)
    if name == "identities":
        return identities_suite(samples, seed)
    raise KeyError(name)
