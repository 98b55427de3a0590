import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import lsim_n9
from nullsim.analysis import analyze, cartan_apparatus
from nullsim.catalog import (CatalogParams, example_curve, example_expr, helix_curve, helix_expr, null_helix,
                             self_similar_case, self_similar_curve, self_similar_expr)
from nullsim.errors import InvalidParamsError
from nullsim.minkowski import lorentzian_dot

R2 = math.sqrt(2.0)
CASES = [(1, CatalogParams(c=1.0)), (2, CatalogParams(b=0.3)), (3, CatalogParams(a=0.5, c=1.0)),
         (4, CatalogParams(a=0.5, b=0.3))]


def test_case1_at_origin():
    np.testing.assert_allclose(self_similar_case(1, CatalogParams(c=1.0), 0.0), [0, 1 / R2, 0, -1 / R2],
                               atol=1e-16)


def test_example_at_origin():
    np.testing.assert_allclose(example_curve(0.0), np.array([0, 2, 0, 2]) / R2, atol=1e-15)


def test_example_tangent_is_sigma_squared_lsim():
    # d/dsigma of the closed form equals sigma^2 (cosh, sinh, cos, sin)/sqrt 2
    s = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(example_expr()(s, 1), s[:, None] ** 2 * lsim_n9(s), rtol=1e-13, atol=1e-14)


def test_closed_forms_match_printed_formulas():
    s = np.linspace(-1.0, 2.0, 13)
    c = 2.0
    np.testing.assert_allclose(self_similar_case(1, CatalogParams(c=c), s),
                               np.stack([np.sinh(s), np.cosh(s), np.sin(s), -np.cos(s)], 1) / (c * R2),
                               atol=1e-14)
    b = 0.3
    w1, w2 = 2 * b + 1, 2 * b - 1
    e = np.exp(2 * b * s)
    case2 = np.stack([np.exp(w1 * s) / w1 + np.exp(w2 * s) / w2,
                      np.exp(w1 * s) / w1 - np.exp(w2 * s) / w2,
                      e * (4 * b * np.cos(s) + 2 * np.sin(s)) / (4 * b * b + 1),
                      e * (-2 * np.cos(s) + 4 * b * np.sin(s)) / (4 * b * b + 1)], 1) / (2 * R2)
    np.testing.assert_allclose(self_similar_case(2, CatalogParams(b=b), s), case2, atol=1e-14)
    kappa, tau = 1.0, 2.0
    p = CatalogParams(kappa=kappa, tau=tau)
    v, r = p.v, p.r
    helix = np.stack([np.sinh(v * s) / v, np.cosh(v * s) / v, np.sin(r * s) / r, -np.cos(r * s) / r], 1)
    np.testing.assert_allclose(null_helix(kappa, tau, s), helix / math.sqrt(v * v + r * r), atol=1e-14)


def test_case3_with_zero_a_reduces_to_case1():
    s = np.linspace(0, 3, 31)
    np.testing.assert_array_equal(self_similar_case(3, CatalogParams(a=0.0, c=1.0), s),
                                  self_similar_case(1, CatalogParams(c=1.0), s))


def test_case1_equals_alpha0():
    s = np.linspace(-2, 2, 41)
    for c in (0.5, 1.0, 3.0):
        # sigma = sqrt(c) s for constant torsion c
        np.testing.assert_allclose(self_similar_case(1, CatalogParams(c=c), math.sqrt(c) * s),
                                   null_helix(0.0, c, s), atol=1e-12)
    np.testing.assert_allclose(self_similar_case(1, CatalogParams(c=1.0), s), null_helix(0.0, 1.0, s), atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3), st.floats(0.05, 0.45), st.floats(-2, 2))
def test_catalog_curves_are_null(a, c, b, s):
    exprs = [self_similar_expr(1, CatalogParams(c=c)), self_similar_expr(2, CatalogParams(b=b)),
             helix_expr(a, c), example_expr()]
    if a != 0:
        exprs.append(self_similar_expr(3, CatalogParams(a=a, c=c)))
        if 2 * b != CatalogParams(a=a).q1:
            exprs.append(self_similar_expr(4, CatalogParams(a=a, b=b)))
    for expr in exprs:
        d = expr(np.array([s]), 1)[0]
        assert abs(lorentzian_dot(d, d)) <= 1e-10 * max(1.0, float(d @ d))


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(0.01, 10), st.floats(-5, 5))
def test_helix_identities(kappa, tau, s):
    p = CatalogParams(a=kappa, kappa=kappa, tau=tau)
    assert p.q1 * p.q2 == pytest.approx(1.0, abs=1e-14)
    assert p.r ** 2 - p.v ** 2 == pytest.approx(2 * kappa, abs=1e-12 * max(1, abs(kappa) + tau))
    assert p.r * p.v == pytest.approx(tau, rel=1e-12)
    expr = helix_expr(kappa, tau)
    d2 = expr(np.array([s]), 2)[0]
    assert lorentzian_dot(d2, d2) == pytest.approx(1.0, abs=1e-9 * max(1.0, float(d2 @ d2)))


def test_helix_curvature_round_trip():
    data = cartan_apparatus(self_similar_curve(1, CatalogParams(c=1.0), 0, 1).with_interval(0, 1), 0.5)
    assert data.kappa == pytest.approx(0.0, abs=1e-12)
    data = cartan_apparatus(helix_curve(1.0, 2.0, 0, 1), 0.5)
    assert data.kappa == pytest.approx(1.0, abs=1e-12)
    assert data.tau_mag == pytest.approx(2.0, abs=1e-12)


def test_case3_curvature_ratio():
    a, c = 0.5, 1.0
    data = cartan_apparatus(self_similar_curve(3, CatalogParams(a=a, c=c), -1, 1), 0.2)
    assert data.kappa / data.tau_mag == pytest.approx(a, abs=1e-12)


@pytest.mark.parametrize("case,params", CASES)
def test_self_similar_curves_have_constant_signatures(case, params):
    _, sig = analyze(self_similar_curve(case, params, -1.0, 1.0))
    assert np.std(sig.kappa_tilde) < 1e-10
    assert np.std(sig.tau_tilde) < 1e-10


def test_printed_growing_cases_carry_the_quadrature_offset():
    # kappa~ of the printed curves is (z1 - z2' + z2^2/2) with z1 = a, z2 = b
    _, sig2 = analyze(self_similar_curve(2, CatalogParams(b=0.3), -1.0, 1.0))
    _, sig4 = analyze(self_similar_curve(4, CatalogParams(a=0.5, b=0.3), -1.0, 1.0))
    assert np.mean(sig2.kappa_tilde) == pytest.approx(0.3 ** 2 / 2, abs=1e-12)
    assert np.mean(sig4.kappa_tilde) == pytest.approx(0.5 + 0.3 ** 2 / 2, abs=1e-12)
    assert np.mean(sig2.tau_tilde) == pytest.approx(0.3, abs=1e-10)


@pytest.mark.parametrize("case,params", [
    (1, CatalogParams(c=0.0)), (2, CatalogParams(b=0.0)), (2, CatalogParams(b=0.5)),
    (4, CatalogParams(a=0.0, b=0.3)), (4, CatalogParams(a=0.5, b=0.0)), (7, CatalogParams()),
])
def test_invalid_params(case, params):
    with pytest.raises(InvalidParamsError):
        self_similar_expr(case, params)


def test_helix_needs_nonzero_tau():
    with pytest.raises(InvalidParamsError):
        null_helix(1.0, 0.0, 0.5)
