"""Cartan apparatus and similarity invariants of null curves.

All derivatives of the input are taken with respect to its own parameter
``t``; conversion to pseudo-arc ``s`` goes through ``phi = ds/dt =
(g''.g'')^(1/4)`` and needs derivatives up to order four only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .curves import CurveSource, SampledCurve, fornberg_weights, smooth_derivative
from .errors import (DegenerateAccelerationError, NotCartanError, NotNullCurveError,
                     OutOfRangeError, ZeroTorsionError)
from .minkowski import METRIC, ORIENTATION_SIGN, PseudoOrthonormalFrame, lorentzian_dot

DEFAULT_NULL_TOL = 1e-6
DEFAULT_RANK_TOL = 1e-8
DEFAULT_TORSION_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class CartanData:
    frame: PseudoOrthonormalFrame
    kappa: float
    tau_mag: float
    tau_sign: int


@dataclass(frozen=True)
class CartanProfile:
    """Cartan frame and curvatures sampled along a curve.

    ``s`` and ``sigma`` are measured from the first sample. ``frames`` has
    shape ``(n, 4, 4)`` with rows ``(L, N, W1, W2)``.
    """

    t: np.ndarray
    s: np.ndarray
    sigma: np.ndarray
    kappa: np.ndarray
    tau_mag: np.ndarray
    tau_sign: np.ndarray
    frames: np.ndarray
    positions: np.ndarray
    ds_dt: np.ndarray

    def __len__(self):
        return len(self.t)

    def frame(self, i: int, tol: float = 1e-6) -> PseudoOrthonormalFrame:
        return PseudoOrthonormalFrame.from_matrix(self.frames[i], tol=tol)

    @property
    def tau_signed(self) -> np.ndarray:
        return self.tau_sign * self.tau_mag


@dataclass(frozen=True)
class ShapeSignature:
    sigma: np.ndarray
    kappa_tilde: np.ndarray
    tau_tilde: np.ndarray

    def __post_init__(self):
        n = len(self.sigma)
        if len(self.kappa_tilde) != n or len(self.tau_tilde) != n:
            raise ValueError("signature arrays must have equal length")
        if n < 2 or np.any(np.diff(self.sigma) <= 0):
            raise ValueError("signature sigma must be strictly increasing")

    def __len__(self):
        return len(self.sigma)

    def shifted(self, delta: float) -> "ShapeSignature":
        return ShapeSignature(self.sigma + delta, self.kappa_tilde, self.tau_tilde)


@dataclass(frozen=True)
class ShapeFrame:
    Lsim: np.ndarray
    Nsim: np.ndarray
    W1sim: np.ndarray
    W2sim: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    H4: np.ndarray

    @property
    def sim_matrix(self) -> np.ndarray:
        return np.stack([self.Lsim, self.Nsim, self.W1sim, self.W2sim])

    @property
    def h_matrix(self) -> np.ndarray:
        return np.stack([self.H1, self.H2, self.H3, self.H4])


def _hodge(a, b, c):
    """Vector ``w`` with ``w . x = det(a, b, c, x)`` under the Lorentzian product."""
    m = np.stack([a, b, c], axis=-2)
    cof = np.empty(a.shape)
    for j in range(4):
        cols = [k for k in range(4) if k != j]
        cof[..., j] = (-1) ** (3 + j) * np.linalg.det(m[..., cols])
    return cof @ METRIC


def cartan_from_derivatives(D: np.ndarray, null_tol: float = DEFAULT_NULL_TOL,
                            rank_tol: float = DEFAULT_RANK_TOL, t=None) -> dict:
    """Cartan apparatus from parameter derivatives ``D`` of shape ``(n, 5, 4)``.

    Returns a dict of arrays: ``frames``, ``kappa``, ``tau_mag``,
    ``tau_sign``, ``phi`` (``ds/dt``).
    """
    D = np.asarray(D, dtype=float)
    d1, d2, d3, d4 = D[:, 1], D[:, 2], D[:, 3], D[:, 4]
    where = (lambda i: f" at t={t[i]:.17g}") if t is not None else (lambda i: f" at sample {i}")

    n1 = lorentzian_dot(d1, d1)
    scale1 = np.einsum("ij,ij->i", d1, d1)
    bad = np.abs(n1) > null_tol * np.maximum(scale1, np.finfo(float).tiny)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotNullCurveError(f"tangent is not null{where(i)}: g'.g' = {n1[i]:.3e}")

    g = lorentzian_dot(d2, d2)
    if np.any(g <= 0):
        i = int(np.argmax(g <= 0))
        raise DegenerateAccelerationError(f"g''.g'' = {g[i]:.3e} is not positive{where(i)}")

    sv = np.linalg.svd(D[:, 1:], compute_uv=False)
    bad = sv[:, -1] < rank_tol * sv[:, 0]
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotCartanError(f"derivatives are linearly dependent{where(i)}")

    g1 = 2.0 * lorentzian_dot(d2, d3)
    g2 = 2.0 * (lorentzian_dot(d3, d3) + lorentzian_dot(d2, d4))
    phi = g ** 0.25
    dphi = 0.25 * g ** -0.75 * g1
    ddphi = 0.25 * g ** -0.75 * g2 - 0.1875 * g ** -1.75 * g1 ** 2

    p = phi[:, None]
    L = d1 / p
    W1 = d2 / p ** 2 - dphi[:, None] * d1 / p ** 3
    g3 = (d3 / p ** 3 - 3.0 * dphi[:, None] * d2 / p ** 4
          + (3.0 * dphi ** 2 - phi * ddphi)[:, None] * d1 / p ** 5)
    kappa = 0.5 * lorentzian_dot(g3, g3)
    N = -g3 - kappa[:, None] * L

    w = _hodge(L, N, W1)
    W2 = ORIENTATION_SIGN * w / np.sqrt(lorentzian_dot(w, w))[:, None]
    # Only the pseudo-arc fourth derivative has a W2 component; lower-order
    # chain-rule terms lie in span(L, N, W1).
    tau_signed = -lorentzian_dot(W2, d4) / phi ** 4
    frames = np.stack([L, N, W1, W2], axis=1)
    return {
        "frames": frames,
        "kappa": kappa,
        "tau_mag": np.abs(tau_signed),
        "tau_sign": np.where(tau_signed >= 0, 1, -1),
        "phi": phi,
    }


def cartan_apparatus(curve: CurveSource, t: float, null_tol: float = DEFAULT_NULL_TOL,
                     rank_tol: float = DEFAULT_RANK_TOL) -> CartanData:
    """Cartan frame, ``kappa`` and ``|tau|`` of ``curve`` at parameter ``t``."""
    D = curve.derivatives(np.atleast_1d(float(t)), 4)
    out = cartan_from_derivatives(D, null_tol, rank_tol, t=np.atleast_1d(t))
    frame = PseudoOrthonormalFrame.from_matrix(out["frames"][0], tol=max(1e-6, 10 * null_tol))
    return CartanData(frame, float(out["kappa"][0]), float(out["tau_mag"][0]), int(out["tau_sign"][0]))


def _phi_integrand(curve: CurveSource, null_tol: float):
    def f(u):
        d = curve.derivatives(np.atleast_1d(u), 2)[0]
        q = lorentzian_dot(d[1], d[1])
        if abs(q) > null_tol * max(float(d[1] @ d[1]), np.finfo(float).tiny):
            raise NotNullCurveError(f"tangent is not null at t={u:.17g}")
        g = lorentzian_dot(d[2], d[2])
        if g <= 0:
            raise DegenerateAccelerationError(f"g''.g'' = {g:.3e} is not positive at t={u:.17g}")
        return g ** 0.25
    return f


def pseudo_arc_length(curve: CurveSource, t0: float, t: float, tol: float = 1e-10,
                      null_tol: float = DEFAULT_NULL_TOL) -> float:
    """Pseudo-arc length of ``curve`` from ``t0`` to ``t``."""
    if t == t0:
        return 0.0
    for v in (t0, t):
        if not curve.t_min - 1e-12 <= v <= curve.t_max + 1e-12:
            raise OutOfRangeError(f"parameter {v} outside [{curve.t_min}, {curve.t_max}]")
    if isinstance(curve, SampledCurve):
        prof = cartan_profile(curve, null_tol=null_tol)
        spline = CubicSpline(prof.t, prof.s)
        return float(spline(t) - spline(t0))
    val, _ = integrate.quad(_phi_integrand(curve, null_tol), t0, t, epsabs=tol, epsrel=tol, limit=200)
    return float(val)


def _gauss_cumulative(curve: CurveSource, t: np.ndarray, null_tol: float, rank_tol: float):
    """Cumulative ``s`` and ``sigma`` over ``t`` by 8-point Gauss rules per interval."""
    a, b = t[:-1], t[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    D = curve.derivatives(nodes.ravel(), 4)
    out = cartan_from_derivatives(D, null_tol, rank_tol)
    phi = out["phi"].reshape(nodes.shape)
    rate = np.sqrt(out["tau_mag"]).reshape(nodes.shape) * phi
    ds = half * (phi @ _GL_WEIGHTS)
    dsig = half * (rate @ _GL_WEIGHTS)
    return np.concatenate([[0.0], np.cumsum(ds)]), np.concatenate([[0.0], np.cumsum(dsig)])


def cartan_profile(curve: CurveSource, t=None, null_tol: float = DEFAULT_NULL_TOL,
                   rank_tol: float = DEFAULT_RANK_TOL) -> CartanProfile:
    """Cartan apparatus at every point of the grid ``t``.

    The default grid is the sample grid for sampled curves and 2001 uniform
    points for analytic ones. Pseudo-arc and pseudo-de Sitter parameters are
    integrated with Gauss rules for analytic curves and with cumulative
    Simpson over the grid for sampled ones.
    """
    t = curve.default_grid() if t is None else np.asarray(t, dtype=float)
    if t.ndim != 1 or len(t) < 3 or np.any(np.diff(t) <= 0):
        raise ValueError("profile grid must be strictly increasing with at least 3 points")
    D = curve.derivatives(t, 4)
    out = cartan_from_derivatives(D, null_tol, rank_tol, t=t)
    if isinstance(curve, SampledCurve):
        s = integrate.cumulative_simpson(out["phi"], x=t, initial=0.0)
        sigma = integrate.cumulative_simpson(np.sqrt(out["tau_mag"]) * out["phi"], x=t, initial=0.0)
    else:
        s, sigma = _gauss_cumulative(curve, t, null_tol, rank_tol)
    return CartanProfile(t=t, s=s, sigma=sigma, kappa=out["kappa"], tau_mag=out["tau_mag"],
                         tau_sign=out["tau_sign"], frames=out["frames"], positions=D[:, 0, :],
                         ds_dt=out["phi"])


def grid_derivative(x: np.ndarray, y: np.ndarray, width: int = 5) -> np.ndarray:
    """First derivative of samples ``y(x)`` by ``width``-point interpolatory stencils.

    Stencils are centred where possible and shifted inward at the ends.
    """
    n = len(x)
    width = min(width, n)
    start = np.clip(np.arange(n) - width // 2, 0, n - width)
    idx = start[:, None] + np.arange(width)[None, :]
    w = fornberg_weights(x[idx], x, 1)[:, 1, :]
    return np.sum(w * y[idx], axis=1)


def de_sitter_reparam(profile: CartanProfile, sigma0_at: int = 0,
                      torsion_tol: float = DEFAULT_TORSION_TOL, smooth: bool = False) -> ShapeSignature:
    """Shape curvatures over the pseudo-de Sitter parameter.

    ``kappa_tilde = kappa / tau`` and ``tau_tilde = -(dtau/dsigma) / (2 tau)``.
    By default ``dtau/dsigma`` comes from five-point differences on the
    sigma grid, which suits exact (analytic) curvatures. With ``smooth=True``
    (used for sampled curves) ``tau`` is differentiated in ``t`` by the
    least-squares stencils and divided by ``dsigma/dt = sqrt(tau) ds/dt``;
    this suppresses the sample-to-sample jitter of estimated curvatures.
    ``sigma`` is zero at sample ``sigma0_at``.
    """
    tau = profile.tau_mag
    if np.any(tau <= torsion_tol):
        i = int(np.argmax(tau <= torsion_tol))
        raise ZeroTorsionError(f"|tau| = {tau[i]:.3e} at t={profile.t[i]:.17g}")
    sigma = profile.sigma - profile.sigma[sigma0_at]
    if smooth:
        dtau = smooth_derivative(profile.t, tau) / (np.sqrt(tau) * profile.ds_dt)
    else:
        dtau = grid_derivative(sigma, tau)
    return ShapeSignature(sigma=sigma, kappa_tilde=profile.kappa / tau, tau_tilde=-dtau / (2.0 * tau))


def shape_frames(profile: CartanProfile, at: int, torsion_tol: float = DEFAULT_TORSION_TOL) -> ShapeFrame:
    tau = float(profile.tau_mag[at])
    if tau <= torsion_tol:
        raise ZeroTorsionError(f"|tau| = {tau:.3e} at sample {at}")
    L, N, W1, W2 = profile.frames[at]
    rt = np.sqrt(tau)
    Ls, Ns = rt * L, N / rt
    return ShapeFrame(Ls, Ns, W1.copy(), W2.copy(), Ls / tau, Ns / tau, W1 / tau, W2 / tau)


def sim_frame_generator(kappa_tilde: float, tau_tilde: float, tau_sign: int = 1) -> np.ndarray:
    """Matrix ``G`` with ``d/dsigma C^sim = G C^sim`` (rows Lsim, Nsim, W1sim, W2sim)."""
    k, t, e = kappa_tilde, tau_tilde, tau_sign
    return np.array([[-t, 0.0, 1.0, 0.0],
                     [0.0, t, k, e],
                     [-k, -1.0, 0.0, 0.0],
                     [-e, 0.0, 0.0, 0.0]])


def shape_frame_generator(kappa_tilde: float, tau_tilde: float, tau_sign: int = 1) -> np.ndarray:
    """Matrix ``G`` with ``d/dsigma C^H = G C^H``.

    ``C^H = C^sim / tau`` adds ``2 tau_tilde`` to the diagonal. When
    ``tau_tilde = 0`` both generators reduce to the constant-torsion form
    used by the reconstruction ODE.
    """
    return sim_frame_generator(kappa_tilde, tau_tilde, tau_sign) + 2.0 * tau_tilde * np.eye(4)


def analyze(curve: CurveSource, t=None, sigma0_at: int = 0, null_tol: float = DEFAULT_NULL_TOL,
            rank_tol: float = DEFAULT_RANK_TOL) -> tuple[CartanProfile, ShapeSignature]:
    profile = cartan_profile(curve, t, null_tol=null_tol, rank_tol=rank_tol)
    return profile, de_sitter_reparam(profile, sigma0_at, smooth=isinstance(curve, SampledCurve))


def sigma_to_t(curve: CurveSource, profile: CartanProfile, sigma: float) -> float:
    """Parameter ``t`` at which the profile's ``sigma`` (from its first sample) equals ``sigma``."""
    sig = profile.sigma
    if not sig[0] - 1e-12 <= sigma <= sig[-1] + 1e-12:
        raise OutOfRangeError(f"sigma {sigma} outside [{sig[0]}, {sig[-1]}]")
    j = int(np.clip(np.searchsorted(sig, sigma) - 1, 0, len(sig) - 2))
    if isinstance(curve, SampledCurve):
        return float(CubicSpline(sig, profile.t)(sigma))
    t_j = profile.t[j]

    def rate(u):
        out = cartan_from_derivatives(curve.derivatives(np.atleast_1d(u), 4))
        return float(np.sqrt(out["tau_mag"][0]) * out["phi"][0])

    def residual(u):
        return sig[j] + integrate.quad(rate, t_j, u, epsabs=1e-13, epsrel=1e-13)[0] - sigma

    lo, hi = profile.t[j], profile.t[j + 1]
    r_lo, r_hi = residual(lo), residual(hi)
    if r_lo == 0:
        return float(lo)
    if r_hi == 0 or np.sign(r_lo) == np.sign(r_hi):
        return float(hi if abs(r_hi) < abs(r_lo) else lo)
    return float(brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
