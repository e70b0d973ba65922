import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcgap import DegenerateInputError, DomainError, UsageError
from cmcgap import constants as pc
from cmcgap import gap
from cmcgap import spectrum as sp


def test_simons_examples():
    ra = pc.ring_alpha((4, 1.0), 1.0)
    assert gap.simons_rhs(4, 1.0, 1.0, ra) == pytest.approx(0.0, abs=1e-12)
    assert gap.simons_rhs(4, 1.0, 1.0, 3.878) == pytest.approx(1.65133, abs=1e-5)
    top = ra + pc.delta_band((4, 1.0), 1.0)
    assert gap.simons_rhs(4, 1.0, 1.0, top) == pytest.approx(1.65122, abs=1e-4)
    assert gap.simons_rhs(4, 0.0, 1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        gap.simons_rhs(4, 1.0, 1.0, -1.0)


def test_simons_balance_residual_for_boundary_model():
    # At the rigid model grad h = 0 and phi is that of its spectrum.
    for n, H, c in [(4, 1.0, 1.0), (7, 0.5, 0.0), (10, 2.0, -0.5)]:
        m = gap.boundary_model(n, H, c)
        phi = sp.functionals(gap.spectrum_of_model(m)).phi
        res = gap.simons_balance_residual(n, m.H, c, m.ring_s, 0.0, phi)
        assert abs(res) < 1e-9 * max(1.0, m.S**2)


def test_band_phi_bound_examples():
    ra = pc.ring_alpha((4, 1.0), 1.0)
    lhs, rhs = gap.band_phi_bound(4, 1.0, 1.0, ra)
    assert lhs == pytest.approx(0.0, abs=1e-12)
    assert rhs == pytest.approx(0.2 * 2 * math.sqrt(4 / 3 * ra), rel=1e-14)
    assert rhs == pytest.approx(0.877734, abs=1e-6)
    lhs, rhs = gap.band_phi_bound(4, 1.0, 1.0, ra + 4 / 15)
    assert lhs <= rhs
    assert lhs == pytest.approx(0.42579, abs=1e-4)
    assert rhs == pytest.approx(0.90956, abs=1e-5)
    with pytest.raises(UsageError):
        gap.band_phi_bound(4, 1.0, 1.0, ra + 1.0)


def test_band_eta_coefficient_example():
    ra = pc.ring_alpha((4, 1.0), 1.0)
    value, floor = gap.band_eta_coefficient(4, 1.0, 1.0, ra)
    assert value == pytest.approx(-7.60140, abs=1e-5)
    assert floor == pytest.approx(-9.12168, abs=1e-5)
    assert value >= floor
    assert value == pytest.approx(-7.60124, abs=1e-3)


@pytest.mark.parametrize(
    "S,tag",
    [
        (7.0, gap.GapTag.SUBCRITICAL),
        (7.61133, gap.GapTag.RIGID_BOUNDARY),
        (7.7, gap.GapTag.FORBIDDEN_BAND),
        (12.0, gap.GapTag.ABOVE),
    ],
)
def test_classify_contract(S, tag):
    r = gap.classify(4, 1.0, 1.0, S)
    assert r.tag is tag
    lo, hi = r.band
    assert lo == pytest.approx(7.61133, abs=1e-4)
    assert hi == pytest.approx(7.87800, abs=1e-4)


def test_classify_band_edges():
    a = pc.alpha_general((4, 1.0), 1.0)
    d = pc.delta_band((4, 1.0), 1.0)
    assert gap.classify(4, 1.0, 1.0, a).tag is gap.GapTag.RIGID_BOUNDARY
    assert gap.classify(4, 1.0, 1.0, a + d).tag is gap.GapTag.FORBIDDEN_BAND
    assert gap.classify(4, 1.0, 1.0, a + d + 1e-3).tag is gap.GapTag.ABOVE
    assert gap.classify(4, 1.0, 1.0, a + 1e-3).tag is gap.GapTag.FORBIDDEN_BAND


def test_classify_errors():
    with pytest.raises(DomainError):
        gap.classify(4, 1.0, 1.0, 3.0)
    with pytest.raises(DomainError):
        gap.classify(4, 0.5, -1.0, 5.0)
    with pytest.raises(UsageError):
        gap.classify(3, 1.0, 1.0, 8.0)


@pytest.mark.parametrize("n", [4, 9, 30])
@pytest.mark.parametrize("H", [0.1, 0.5, 1.0, 2.0])
def test_clifford_models_realize_alpha_k(n, H):
    for k in range(1, n):
        m = gap.clifford_model(n, k, pc.lambda_k(n, H, k))
        assert abs(m.H - H) < 1e-9
        assert m.S == pytest.approx(pc.alpha_k(n, H, k), rel=1e-8)


def test_clifford_model_examples():
    m = gap.clifford_model(4, 2, 1.0)
    assert m.H == 0.0 and m.S == 4.0
    # negative raw H flips orientation
    m = gap.clifford_model(4, 3, 0.5)
    assert m.H > 0
    with pytest.raises(UsageError):
        gap.clifford_model(4, 0, 1.0)
    with pytest.raises(UsageError):
        gap.clifford_model(4, 1, -1.0)


def test_boundary_model_matches_alpha():
    for n, H, c in [(4, 1.0, 1.0), (6, 0.3, 0.0), (12, 1.5, -0.5)]:
        m = gap.boundary_model(n, H, c)
        assert m.H == pytest.approx(H, abs=1e-12)
        assert m.S == pytest.approx(pc.alpha_general((n, c), H), rel=1e-10)


def test_muenzner_values():
    assert gap.muenzner_s(6, 1) == 0.0
    assert gap.muenzner_s(6, 3) == 12.0
    assert gap.muenzner_s(8, 2) == gap.clifford_model(8, 4, 1.0).S
    with pytest.raises(UsageError):
        gap.muenzner_s(6, 5)


def test_spectrum_of_model():
    s = gap.spectrum_of_model(gap.clifford_model(5, 1, pc.lambda_k(5, 1.0, 1)))
    np.testing.assert_allclose(s.mu, sp.extremal_spectrum(5).mu, atol=1e-12)
    with pytest.raises(DegenerateInputError):
        gap.spectrum_of_model(gap.ModelHypersurface(4, 1, 1.0, 1.0, (1.0,) * 4, 1.0, 4.0))


def test_nearest_model():
    k, lam, S = gap.nearest_model(4, 1.0, 1.0, 7.61133)
    assert k == 1 and lam == pytest.approx(1.54858, abs=1e-5)
    k, _, S = gap.nearest_model(4, 1.0, 1.0, 12.5)
    assert k == 2 and S == pytest.approx(12.0)
    k, lam, S = gap.nearest_model(4, 1.0, 0.0, 100.0)
    assert k == 1 and S == pytest.approx(16 / 3, rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(4, 30),
    H=st.floats(0.05, 3.0),
    c=st.sampled_from([-0.5, 0.0, 1.0]),
    t=st.floats(0.0, 1.0),
)
def test_band_inequalities_hold(n, H, c, t):
    if H * H + c <= 1e-3:
        return
    ra = pc.ring_alpha((n, c), H)
    s = ra + t * pc.delta_band((n, c), H)
    lhs, rhs = gap.band_phi_bound(n, H, c, s)
    assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))
    value, floor = gap.band_eta_coefficient(n, H, c, s)
    assert value >= floor - 1e-9 * max(1.0, abs(floor))


@settings(max_examples=150, deadline=None)
@given(n=st.integers(4, 30), H=st.floats(0.05, 3.0), S_off=st.floats(-5.0, 20.0))
def test_classification_is_consistent_with_band(n, H, S_off):
    a = pc.alpha_general((n, 1.0), H)
    d = pc.delta_band((n, 1.0), H)
    S = max(a + S_off, n * H * H)
    r = gap.classify(n, H, 1.0, S)
    if r.tag is gap.GapTag.FORBIDDEN_BAND:
        assert a - r.tol < S <= a + d + r.tol
    elif r.tag is gap.GapTag.SUBCRITICAL:
        assert S < a
    elif r.tag is gap.GapTag.ABOVE:
        assert S > a + d
