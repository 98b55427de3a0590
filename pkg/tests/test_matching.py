import math

import numpy as np
import pytest

from helpers import random_similarity
from nullsim.analysis import ShapeSignature, analyze
from nullsim.catalog import example_source, helix_curve
from nullsim.curves import sample_curve, transform_curve
from nullsim.errors import InsufficientOverlapError
from nullsim.matching import MatchVerdict, decide_similar, match_signatures
from nullsim.minkowski import NullRotation, PSimilarity


def _signature(sigma, kappa, tau):
    return ShapeSignature(np.asarray(sigma, float), np.asarray(kappa, float), np.asarray(tau, float))


def test_identical_signatures():
    _, sig = analyze(example_source(1.0, 3.0))
    shift, residual = match_signatures(sig, sig)
    assert shift == 0.0
    assert residual == 0.0


def test_known_shift_is_found():
    s = np.linspace(0.0, 4.0, 401)
    A = _signature(s, np.sin(s), np.cos(s))
    B = _signature(s, np.sin(s - 0.7), np.cos(s - 0.7))
    shift, residual = match_signatures(A, B)
    assert shift == pytest.approx(0.7, abs=1e-8)
    assert residual < 1e-4  # interpolation error of the piecewise-linear signatures


def test_resampled_helix_from_different_start():
    # sigma is affine in s for a helix, so both signatures are constant
    A = analyze(helix_curve(1.0, 1.0, 0.0, 3.0))[1]
    B = analyze(helix_curve(1.0, 1.0, 0.4, 3.4))[1]
    _, residual = match_signatures(A, B)
    assert residual <= 1e-8


def test_constant_gap_is_reported():
    A = analyze(helix_curve(1.0, 1.0, 0.0, 2.0))[1]
    B = analyze(helix_curve(2.0, 1.0, 0.0, 2.0))[1]
    shift, residual = match_signatures(A, B)
    assert shift == 0.0
    assert residual >= 1.0 - 1e-9


def test_insufficient_overlap():
    A = _signature(np.linspace(0, 1, 11), np.zeros(11), np.zeros(11))
    B = _signature(np.linspace(0, 10, 11), np.zeros(11), np.zeros(11))
    with pytest.raises(InsufficientOverlapError):
        match_signatures(A, B, min_overlap=1.5)


def test_curve_against_itself_recovers_identity():
    curve = example_source(1.0, 3.0)
    v = decide_similar(curve, curve)
    assert v.similar and v.mu == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(v.recovered.linear, np.eye(4), atol=1e-9)
    np.testing.assert_allclose(v.recovered.translation, 0.0, atol=1e-9)


def test_recovers_scale_four(rng):
    helix = helix_curve(1.0, 1.0, 0.0, 2.0)
    f = random_similarity(rng, mu=4.0)
    v = decide_similar(helix, transform_curve(helix, f))
    assert v.similar
    assert v.mu == pytest.approx(4.0, rel=1e-6)
    np.testing.assert_allclose(v.recovered.linear, f.linear, atol=1e-6 * np.max(np.abs(f.linear)))


def test_helices_with_different_shape_are_not_similar():
    v = decide_similar(helix_curve(1.0, 1.0, 0.0, 2.0), helix_curve(2.0, 1.0, 0.0, 2.0))
    assert not v.similar
    assert v.recovered is None
    assert v.residual >= 1.0 - 1e-9


def test_shifted_sub_interval():
    f = PSimilarity(0.5, NullRotation(1.2, 0.1, 0.2, 0.3), np.array([1.0, 0.0, -1.0, 2.0]))
    v = decide_similar(example_source(1.0, 3.0), transform_curve(example_source(1.5, 3.0), f))
    assert v.similar
    assert v.sigma_shift == pytest.approx(-0.5, abs=1e-6)
    assert v.mu == pytest.approx(0.5, rel=1e-6)


def test_sampled_curves_use_looser_default():
    t = np.arange(0.0, 2.0005, 1e-3)
    helix = sample_curve(helix_curve(1.0, 2.0, 0.0, 2.0), t)
    f = PSimilarity(2.0, NullRotation(0.8, -0.2, 0.4, 1.0), np.zeros(4))
    v = decide_similar(helix, transform_curve(helix, f))
    assert v.similar
    assert v.diagnostics["tol"] == 1e-3
    assert v.mu == pytest.approx(2.0, rel=1e-4)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        MatchVerdict(False, 0.0, -1.0)
    v = decide_similar(helix_curve(1.0, 1.0, 0.0, 2.0), helix_curve(1.0, 1.0, 0.0, 2.0))
    with pytest.raises(ValueError):
        MatchVerdict(False, 0.0, 0.0, recovered=v.recovered)


def test_mu_recovery_law(rng):
    helix = helix_curve(1.0, 2.0, 0.0, 2.0)
    f = random_similarity(rng)
    v = decide_similar(helix, transform_curve(helix, f))
    assert v.diagnostics["mu_spread"] < 1e-6
    assert math.isclose(v.mu, f.mu, rel_tol=1e-6)
