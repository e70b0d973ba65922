import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcgap import DomainError, UsageError
from cmcgap import constants as pc

mp.mp.dps = 50


# -- independent oracles (50-digit arithmetic) --------------------------------


def ring_alpha_oracle(n, H, c):
    """Smaller root of (n(H^2+c) - x)^2 = (n-2)^2 n/(n-1) H^2 x."""
    n, H, c = mp.mpf(n), mp.mpf(H), mp.mpf(c)
    top = n * (H**2 + c)
    q = (n - 2) ** 2 * n / (n - 1) * H**2
    # x^2 - (2 top + q) x + top^2 = 0
    b = 2 * top + q
    return (b - mp.sqrt(b * b - 4 * top**2)) / 2


def alpha_k_oracle(n, H, k):
    """S of S^{n-k}(r) x S^k(sqrt(1-r^2)) with mean curvature H, found by root search."""
    n, H = mp.mpf(n), mp.mpf(H)

    def mean(lam):
        return ((n - k) * lam - k / lam) / n - H

    lam = mp.findroot(mean, (mp.mpf("1e-6"), mp.mpf(1e6)), solver="anderson")
    assert abs(mean(lam)) < mp.mpf("1e-40")
    return (n - k) * lam**2 + k / lam**2, lam


# -- frozen values ---------------------------------------------------------------


@pytest.mark.parametrize(
    "n,H,c,expected",
    [
        (4, 1.0, 1.0, 7.61133),
        (4, 1.0, 0.0, 16 / 3),
        (4, 0.0, 1.0, 4.0),
        (10, 0.0, 1.0, 10.0),
    ],
)
def test_alpha_examples(n, H, c, expected):
    assert pc.alpha_general((n, c), H) == pytest.approx(expected, abs=1e-5)


def test_ring_alpha_example():
    assert pc.ring_alpha((4, 1.0), 1.0) == pytest.approx(3.61133, abs=1e-5)


def test_beta_and_lambda_examples():
    assert pc.beta(4, 1.0) == pytest.approx(21.72200, abs=1e-5)
    assert pc.lambda_k(4, 1.0, 1) == pytest.approx(1.54858, abs=1e-5)
    assert pc.lambda_general((4, 1.0), 1.0) == pytest.approx(pc.lambda_k(4, 1.0, 1), rel=1e-14)


def test_b_n_is_exact_rational():
    assert pc.b_n_exact(4) == Fraction(1, 5)
    assert pc.b_n_exact(20) == Fraction(1, 5)
    assert pc.b_n_exact(21) == Fraction(49, 250)
    assert pc.b_n(10**6) == 0.196
    with pytest.raises(UsageError):
        pc.b_n(3)


def test_delta_examples():
    assert pc.delta_band((4, 1.0), 1.0) == pytest.approx(4 / 15, abs=1e-12)
    assert pc.delta_band((4, -0.5), 1.0) == pytest.approx(0.0900593, abs=1e-6)
    assert pc.delta_band((4, 1.0), 0.0) == 0.0
    with pytest.raises(UsageError):
        pc.delta_band((3, 1.0), 1.0)
    with pytest.raises(DomainError):
        pc.delta_band((4, -1.0), 0.5)


def test_alpha_k_sphere_values():
    # H = 0: minimal Clifford products have S = n for every k
    for n in range(4, 12):
        for k in range(1, n):
            assert pc.alpha_k(n, 0.0, k) == pytest.approx(n, rel=1e-14)
    assert pc.alpha_k(4, 1.0, 2) == pytest.approx(12.0, rel=1e-14)
    assert pc.beta(7, 0.3) == pytest.approx(pc.alpha_k(7, 0.3, 6), rel=1e-14)


def test_problem_gap_example():
    assert pc.problem_gap_check(4, 1.0) == pytest.approx(8.0, abs=1e-12)
    with pytest.raises(UsageError):
        pc.problem_gap_check(3, 1.0)


def test_errors():
    with pytest.raises(UsageError):
        pc.SpaceFormContext(2, 1.0)
    with pytest.raises(UsageError):
        pc.SpaceFormContext(4.5, 1.0)
    with pytest.raises(DomainError):
        # radicand n^2 H^4 + 4(n-1) c H^2 < 0
        pc.alpha_general((4, -2.0), 1.0)
    with pytest.raises(DomainError):
        pc.CmcInvariants(H=1.0, S=3.0, n=4)
    with pytest.raises(UsageError):
        pc.alpha_k(4, 1.0, 4)


def test_profile_consistency():
    p = pc.pinching_profile((6, 1.0), 0.7)
    assert p.alpha == pytest.approx(p.alpha_k[0], rel=1e-13)
    assert p.beta == pytest.approx(p.alpha_k[-1], rel=1e-13)
    assert p.ring_alpha == pytest.approx(p.alpha - 6 * 0.49, rel=1e-13)
    assert len(p.lambda_k) == 5


# -- oracle comparisons ---------------------------------------------------------


ADMISSIBLE = [
    (n, H, c)
    for n in (4, 5, 10, 21, 50)
    for H in (0.1, 0.5, 1.0, 3.0, 10.0)
    for c in (-0.5, 0.0, 1.0)
    if H * H + c > 0
]


@pytest.mark.parametrize("n,H,c", ADMISSIBLE)
def test_ring_alpha_matches_high_precision_root(n, H, c):
    want = float(ring_alpha_oracle(n, H, c))
    got = pc.ring_alpha((n, c), H)
    assert abs(got - want) <= 1e-12 * max(1.0, n * (H * H + abs(c)))


@pytest.mark.parametrize("n", [4, 7, 12])
@pytest.mark.parametrize("H", [0.1, 1.0, 2.0])
def test_alpha_k_and_lambda_k_match_model_oracle(n, H):
    for k in range(1, n):
        S, lam = alpha_k_oracle(n, H, k)
        assert pc.alpha_k(n, H, k) == pytest.approx(float(S), rel=1e-12)
        assert pc.lambda_k(n, H, k) == pytest.approx(float(lam), rel=1e-12)


def test_bisection_oracle_agrees_with_closed_form():
    for n in (4, 9, 30, 50):
        for H in (0.1, 1.0, 10.0):
            for c in (-0.5, 0.0, 1.0):
                if H * H + c <= 0:
                    continue
                a = pc.ring_alpha((n, c), H)
                b = pc.ring_alpha_by_bisection((n, c), H)
                assert abs(a - b) <= 1e-12 * max(1.0, a)


# -- properties ---------------------------------------------------------------

ns = st.integers(min_value=4, max_value=60)
Hs = st.floats(min_value=0.01, max_value=10.0)
cs = st.sampled_from([-0.5, -0.25, 0.0, 0.5, 1.0, 2.0])


@settings(max_examples=300, deadline=None)
@given(n=ns, H=Hs, c=cs)
def test_lemma3_identity_holds(n, H, c):
    if H * H + c <= 1e-6:
        return
    assert pc.lemma3_relative_residual((n, c), H) < 1e-10


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=4, max_value=40), H=st.floats(min_value=0.01, max_value=10.0))
def test_alpha_k_strictly_increasing(n, H):
    vals = [pc.alpha_k(n, H, k) for k in range(1, n)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(n=ns, H=Hs)
def test_alpha_general_specializes_to_alpha_1(n, H):
    assert pc.alpha_general((n, 1.0), H) == pytest.approx(pc.alpha_k(n, H, 1), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=ns, H=Hs, c=cs)
def test_delta_branch(n, H, c):
    if H * H + c <= 1e-6:
        return
    ctx = pc.SpaceFormContext(n, c)
    ra = pc.ring_alpha(ctx, H)
    lin = n * H * H / (n - 1)
    if c > 0:
        assert lin < ra
        assert pc.delta_band(ctx, H) == pytest.approx(pc.b_n(n) * lin, rel=1e-14)
    else:
        assert lin >= ra - 1e-10 * max(1.0, lin)


@settings(max_examples=100, deadline=None)
@given(n=ns, H=Hs, c=cs)
def test_sign_of_H_is_irrelevant(n, H, c):
    if H * H + c <= 1e-6:
        return
    assert pc.alpha_general((n, c), H) == pc.alpha_general((n, c), -H)
    assert pc.lambda_general((n, c), H) == pc.lambda_general((n, c), -H)


def test_problem_margin_positive_on_grid():
    worst = min(
        pc.problem_gap_check(n, 0.05 * i) for n in range(4, 31) for i in range(1, 41)
    )
    assert worst > 0
    assert math.isfinite(worst)
