import numpy as np
import pytest

from nullsim.catalog import helix_curve
from nullsim.curves import (AnalyticCurve, SampledCurve, estimate_derivatives, fornberg_weights, sample_curve,
                            smooth_derivative, transform_curve)
from nullsim.errors import InsufficientSamplesError, OutOfRangeError
from nullsim.minkowski import NullRotation, PSimilarity


def test_fornberg_matches_textbook_stencils():
    nodes = np.array([[-2.0, -1.0, 0.0, 1.0, 2.0]])
    w = fornberg_weights(nodes, np.array([0.0]), 2)[0]
    np.testing.assert_allclose(w[1], [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-15)
    np.testing.assert_allclose(w[2], [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], atol=1e-14)


def test_sampled_curve_validation():
    t = np.linspace(0, 1, 12)
    with pytest.raises(InsufficientSamplesError):
        SampledCurve(t[:5], np.zeros((5, 4)))
    with pytest.raises(ValueError):
        SampledCurve(t[::-1], np.zeros((12, 4)))
    with pytest.raises(ValueError):
        SampledCurve(t, np.zeros((12, 3)))


def test_range_is_enforced():
    c = helix_curve(1.0, 2.0, 0.0, 1.0)
    with pytest.raises(OutOfRangeError):
        c.derivatives([1.5])


@pytest.mark.parametrize("method", ["lsq", "fd9"])
def test_polynomials_are_differentiated_exactly(method):
    # degree 8 is inside the exactness range of both stencils
    t = np.linspace(-1, 1, 101)
    coef = np.array([0.3, -1.0, 0.5, 2.0, -0.7, 0.1, 0.05, -0.02, 0.01])
    x = np.stack([np.polynomial.polynomial.polyval(t, coef * (k + 1)) for k in range(4)], axis=1)
    c = SampledCurve(t, x)
    for order in range(1, 5):
        exact = np.stack([np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(coef * (k + 1), order))
                          for k in range(4)], axis=1)
        est = estimate_derivatives(c, t, order, stride=1, method=method)
        np.testing.assert_allclose(est, exact, atol=1e-6 * 10 ** order)


@pytest.mark.parametrize("order,expected", [(1, 8), (4, 6)])
def test_nine_point_stencil_order(order, expected):
    # fixed stride, coarse spacing: truncation dominates and scales as h^p
    helix = helix_curve(1.0, 2.0, 0.0, 8.0)
    errs = []
    mid = 4.0
    for h in (0.2, 0.1):
        t = np.arange(0.0, 8.0 + h / 2, h)
        c = sample_curve(helix, t)
        est = estimate_derivatives(c, mid, order, stride=1, method="fd9")
        errs.append(np.max(np.abs(est - helix.derivative(mid, order))))
    observed = np.log2(errs[0] / errs[1])
    assert abs(observed - expected) < 0.3


def test_lsq_default_accuracy_on_helix():
    helix = helix_curve(1.0, 2.0, 0.0, 2.0)
    t = np.arange(0.0, 2.0 + 5e-4, 1e-3)
    D = sample_curve(helix, t).derivatives(t, 4)
    E = helix.derivatives(t, 4)
    for k, bound in zip(range(5), (1e-14, 1e-11, 1e-9, 1e-7, 1e-6)):
        assert np.max(np.abs(D[:, k] - E[:, k])) / np.max(np.abs(E[:, k])) < bound


def test_smooth_derivative():
    t = np.linspace(0, 3, 301)
    np.testing.assert_allclose(smooth_derivative(t, np.sin(t)), np.cos(t), atol=1e-9)


def test_transformed_curve_derivatives(rng):
    helix = helix_curve(0.5, 1.0, 0.0, 1.0)
    f = PSimilarity(2.0, NullRotation(1.3, 0.2, -0.1, 0.4), rng.normal(size=4))
    g = transform_curve(helix, f)
    t = np.linspace(0, 1, 5)
    np.testing.assert_allclose(g(t), f.apply(helix(t)))
    np.testing.assert_allclose(g.derivative(t, 3), f.apply_linear(helix.derivative(t, 3)))
    sampled = transform_curve(sample_curve(helix, np.linspace(0, 1, 50)), f)
    assert isinstance(sampled, SampledCurve)


def test_analytic_from_callables():
    funcs = [lambda t: np.stack([t, t, 0 * t, 0 * t], 1), lambda t: np.tile([1.0, 1, 0, 0], (len(t), 1))]
    c = AnalyticCurve.from_callables(funcs, 0, 1)
    np.testing.assert_allclose(c.derivative([0.5], 1), [[1, 1, 0, 0]])
    with pytest.raises(ValueError):
        c.derivatives([0.5], 2)
