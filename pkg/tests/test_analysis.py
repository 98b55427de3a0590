import numpy as np
import pytest

from helpers import lsim_n9, reparametrized
from nullsim.analysis import (analyze, cartan_apparatus, cartan_profile, grid_derivative, pseudo_arc_length,
                              shape_frame_generator, shape_frames, sigma_to_t, sim_frame_generator)
from nullsim.catalog import example_source, helix_curve
from nullsim.curves import AnalyticCurve, sample_curve
from nullsim.errors import DegenerateAccelerationError, NotCartanError, NotNullCurveError, ZeroTorsionError
from nullsim.minkowski import FRAME_GRAM, METRIC, ORIENTATION_SIGN


@pytest.mark.parametrize("kappa,tau", [(0.0, 1.0), (1.0, 2.0), (-1.0, 3.0)])
def test_helix_curvatures_and_frame(kappa, tau):
    helix = helix_curve(kappa, tau, -1.0, 2.0)
    data = cartan_apparatus(helix, 0.7)
    assert data.kappa == pytest.approx(kappa, abs=1e-12)
    assert data.tau_mag == pytest.approx(tau, rel=1e-12)
    K = data.frame.matrix
    np.testing.assert_allclose(K @ METRIC @ K.T, FRAME_GRAM, atol=1e-12)
    assert np.sign(np.linalg.det(K)) == ORIENTATION_SIGN
    # L is the unit-speed tangent in pseudo-arc
    np.testing.assert_allclose(K[0], helix.derivative(0.7, 1), atol=1e-13)


def test_frame_equations_hold_along_helix():
    # dL/ds = W1, dW2/ds = -tau L (sign carried by tau_sign)
    helix = helix_curve(1.0, 2.0, 0.0, 2.0)
    h = 1e-4
    s = np.array([1.0 - h, 1.0, 1.0 + h])
    prof = cartan_profile(helix, s)
    dK = (prof.frames[2] - prof.frames[0]) / (2 * h)
    K = prof.frames[1]
    tau = prof.tau_signed[1]
    np.testing.assert_allclose(dK[0], K[2], atol=1e-7)
    np.testing.assert_allclose(dK[2], -prof.kappa[1] * K[0] - K[1], atol=1e-7)
    np.testing.assert_allclose(dK[3], -tau * K[0], atol=1e-7)


def test_reparametrisation_invariance():
    helix = helix_curve(1.0, 2.0, 0.0, 3.0)

    def phi(u, k):
        # s = u + u^3 / 10, monotone on [0, 1.8]
        return [u + u ** 3 / 10, 1 + 0.3 * u ** 2, 0.6 * u, 0.6 + 0 * u, 0 * u][k]

    curve = AnalyticCurve(reparametrized(helix, phi), 0.0, 1.8)
    prof = cartan_profile(curve, np.linspace(0.0, 1.8, 41))
    np.testing.assert_allclose(prof.kappa, 1.0, atol=1e-11)
    np.testing.assert_allclose(prof.tau_mag, 2.0, rtol=1e-11)
    np.testing.assert_allclose(prof.s, prof.t + prof.t ** 3 / 10, atol=1e-11)


def test_pseudo_arc_length_of_helix_is_parameter():
    helix = helix_curve(1.0, 2.0, 0.0, 3.0)
    assert pseudo_arc_length(helix, 0.5, 2.5) == pytest.approx(2.0, abs=1e-10)


def test_signature_of_example_curve():
    # derived independently: sigma = t - 1, tau~ = 1/(sigma0 + sigma), kappa~ = 3/(2 sigma^2)
    prof, sig = analyze(example_source(1.0, 3.0))
    np.testing.assert_allclose(sig.sigma, prof.t - 1.0, atol=1e-10)
    np.testing.assert_allclose(sig.tau_tilde, 1.0 / prof.t, atol=1e-9)
    np.testing.assert_allclose(sig.kappa_tilde, 1.5 / prof.t ** 2, atol=1e-11)


def test_sampled_signature_of_example_curve():
    t = np.arange(1.0, 3.0 + 5e-4, 1e-3)
    prof, sig = analyze(sample_curve(example_source(1.0, 3.0), t))
    np.testing.assert_allclose(sig.tau_tilde, 1.0 / t, atol=1e-3)
    np.testing.assert_allclose(sig.tau_tilde[20:-20], 1.0 / t[20:-20], atol=1e-4)
    np.testing.assert_allclose(sig.kappa_tilde, 1.5 / t ** 2, atol=1e-5)


def test_shape_frame_derivative_matches_generators():
    # sim frame is (sqrt(tau) L, N / sqrt(tau), W1, W2); on the example it equals n9 at sigma = t
    source = example_source(1.0, 3.0)
    h = 1e-4
    t = np.array([2.0 - h, 2.0, 2.0 + h])
    prof = cartan_profile(source, t)
    frames = [shape_frames(prof, i) for i in range(3)]
    np.testing.assert_allclose(frames[1].Lsim, lsim_n9(2.0), atol=1e-12)
    k_t, t_t = 1.5 / 4.0, 0.5
    sign = int(prof.tau_sign[1])
    d_sim = (frames[2].sim_matrix - frames[0].sim_matrix) / (2 * h)
    np.testing.assert_allclose(d_sim, sim_frame_generator(k_t, t_t, sign) @ frames[1].sim_matrix, atol=1e-6)
    d_h = (frames[2].h_matrix - frames[0].h_matrix) / (2 * h)
    np.testing.assert_allclose(d_h, shape_frame_generator(k_t, t_t, sign) @ frames[1].h_matrix, atol=1e-6)


def test_grid_derivative_is_fourth_order():
    x = np.sort(np.random.default_rng(3).uniform(0, 1, 200))
    np.testing.assert_allclose(grid_derivative(x, np.exp(x)), np.exp(x), atol=1e-6)


def test_sigma_to_t_inverts_profile():
    source = example_source(1.0, 3.0)
    prof, _ = analyze(source)
    assert sigma_to_t(source, prof, 1.234) == pytest.approx(2.234, abs=1e-10)


def _line(t, k):
    out = np.zeros((len(t), 4))
    if k == 0:
        out[:, 0] = t
    elif k == 1:
        out[:, 0] = 1.0
    return out


def test_rejects_non_null_curve():
    with pytest.raises(NotNullCurveError):
        cartan_apparatus(AnalyticCurve(_line, 0, 1), 0.5)


def test_rejects_null_line():
    def null_line(t, k):
        out = np.zeros((len(t), 4))
        if k == 0:
            out[:, 0] = out[:, 1] = t
        elif k == 1:
            out[:, :2] = 1.0
        return out
    with pytest.raises(DegenerateAccelerationError):
        cartan_apparatus(AnalyticCurve(null_line, 0, 1), 0.5)


def test_rejects_curve_in_lower_dimensional_space():
    # null tangent ((t^2+1)/2, (t^2-1)/2, t, 0) stays in a hyperplane, so the
    # fourth derivative vanishes and the derivative frame is rank deficient
    def flat(t, k):
        c = [np.stack([(t ** 3 / 3 + t) / 2, (t ** 3 / 3 - t) / 2, t ** 2 / 2, 0 * t], 1),
             np.stack([(t ** 2 + 1) / 2, (t ** 2 - 1) / 2, t, 0 * t], 1),
             np.stack([t, t, 1 + 0 * t, 0 * t], 1),
             np.stack([1 + 0 * t, 1 + 0 * t, 0 * t, 0 * t], 1),
             np.zeros((len(t), 4))]
        return c[k]
    with pytest.raises(NotCartanError):
        cartan_apparatus(AnalyticCurve(flat, 0, 1), 0.5)


def test_zero_torsion_is_reported():
    from nullsim.analysis import de_sitter_reparam
    prof = cartan_profile(helix_curve(1.0, 2.0, 0, 1), np.linspace(0, 1, 11))
    object.__setattr__(prof, "tau_mag", np.zeros(11))
    with pytest.raises(ZeroTorsionError):
        de_sitter_reparam(prof)
