"""Null Cartan curves from prescribed shape curvatures.

The frame ``K = (Lsim, Nsim, W1sim, W2sim)`` solves the linear system
``dK/dsigma = M(sigma) K`` with

    M = [[0, 0, 1, 0], [0, 0, z1, 1], [-z1, -1, 0, 0], [-1, 0, 0, 0]],

and the curve follows from the quadrature

    gamma(sigma) = x0 + (1 / tau0) * int exp(2 A) Lsim,   A = int z2.

Frame, ``A`` and ``gamma`` are advanced together by one fixed-step
classical Runge-Kutta scheme, which keeps the quadrature fourth order.
The quantity ``I* K^T J* K`` equals the identity for every exact solution
and is monitored at every step.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import ShapeSignature
from .curves import CurveSource
from .errors import DomainError, DriftExceededError, InvalidParamsError, QuadratureError
from .minkowski import FRAME_GRAM, METRIC, REFERENCE_FRAME, as_vector

DRIFT_FAIL = 1e-6
DRIFT_WARN = 1e-8
INITIAL_FRAME_TOL = 1e-12

ScalarFunction = Callable[[np.ndarray], np.ndarray]


class DriftWarning(UserWarning):
    """Conserved-quantity deviation above the warning level but below the hard bound."""


def _vectorize(f) -> ScalarFunction:
    if callable(f):
        def g(x):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
        return g
    value = float(f)
    return lambda x: np.full(np.shape(x), value)


def _derivative(f: ScalarFunction) -> ScalarFunction:
    """Five-point central difference with a scale-aware step."""
    def df(x):
        x = np.asarray(x, dtype=float)
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)
    return df


def _second_derivative(f: ScalarFunction) -> ScalarFunction:
    def d2f(x):
        x = np.asarray(x, dtype=float)
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)
    return d2f


@dataclass(frozen=True)
class ShapeCurvatureSpec:
    """Prescribed shape curvatures ``z1`` (kappa~) and ``z2`` (tau~) on ``domain``.

    ``z1`` and ``z2`` are vectorised callables. The optional derivatives
    ``z1_prime``, ``z2_prime`` and ``z2_second`` are used by
    :func:`compensating_z1` and by :class:`ReconstructedCurve`; when absent
    they are approximated by central differences.
    """

    z1: ScalarFunction
    z2: ScalarFunction
    domain: tuple[float, float] = (-math.inf, math.inf)
    z2_prime: ScalarFunction | None = None
    z1_prime: ScalarFunction | None = None
    z2_second: ScalarFunction | None = None

    def __post_init__(self):
        a, b = (float(v) for v in self.domain)
        if not a < b:
            raise DomainError(f"empty domain [{a}, {b}]")
        object.__setattr__(self, "domain", (a, b))
        object.__setattr__(self, "z1", _vectorize(self.z1))
        object.__setattr__(self, "z2", _vectorize(self.z2))

    @classmethod
    def constant(cls, kappa_tilde: float, tau_tilde: float,
                 domain: tuple[float, float] = (-math.inf, math.inf)) -> "ShapeCurvatureSpec":
        zero = lambda x: np.zeros(np.shape(x))  # noqa: E731
        return cls(float(kappa_tilde), float(tau_tilde), domain, z2_prime=zero, z1_prime=zero,
                   z2_second=zero)

    @classmethod
    def from_signature(cls, sig: ShapeSignature) -> "ShapeCurvatureSpec":
        """Piecewise-linear interpolation of a sampled signature."""
        s = np.asarray(sig.sigma, dtype=float)
        k = np.asarray(sig.kappa_tilde, dtype=float)
        t = np.asarray(sig.tau_tilde, dtype=float)
        dt = np.gradient(t, s)
        dk = np.gradient(k, s)
        ddt = np.gradient(dt, s)
        return cls(lambda x: np.interp(x, s, k), lambda x: np.interp(x, s, t), (s[0], s[-1]),
                   z2_prime=lambda x: np.interp(x, s, dt), z1_prime=lambda x: np.interp(x, s, dk),
                   z2_second=lambda x: np.interp(x, s, ddt))

    def derivatives(self, sigma) -> tuple[np.ndarray, ...]:
        """``(z1, z1', z2, z2', z2'')`` at ``sigma``."""
        z1p = self.z1_prime or _derivative(self.z1)
        z2p = self.z2_prime or _derivative(self.z2)
        z2pp = self.z2_second or _second_derivative(self.z2)
        return self.z1(sigma), z1p(sigma), self.z2(sigma), z2p(sigma), z2pp(sigma)

    def contains(self, sigma) -> bool:
        sigma = np.asarray(sigma, dtype=float)
        a, b = self.domain
        slack = 1e-12 * max(1.0, abs(a) if math.isfinite(a) else 1.0, abs(b) if math.isfinite(b) else 1.0)
        return bool(np.all(sigma >= a - slack) and np.all(sigma <= b + slack))

    def check(self, sigma):
        """Raise ``DomainError`` unless both functions are finite on ``sigma`` inside the domain."""
        if not self.contains(sigma):
            raise DomainError(f"sigma grid leaves the domain {self.domain}")
        with np.errstate(all="ignore"):
            bad = ~(np.isfinite(self.z1(sigma)) & np.isfinite(self.z2(sigma)))
        if np.any(bad):
            raise DomainError(f"shape curvatures not finite at sigma={np.asarray(sigma)[bad][0]:.17g}")


def compensating_z1(spec: ShapeCurvatureSpec) -> ShapeCurvatureSpec:
    """Spec whose literal reconstruction has shape curvatures exactly ``(z1, z2)``.

    The quadrature weight ``exp(2 int z2)`` reparametrises the frame system:
    a literal reconstruction with inputs ``(u, z2)`` has
    ``kappa~ = u - z2' + z2^2 / 2`` and ``tau~ = z2``. Feeding
    ``u = z1 + z2' - z2^2 / 2`` therefore produces ``kappa~ = z1``.
    """
    z1, z2 = spec.z1, spec.z2
    dz2 = spec.z2_prime if spec.z2_prime is not None else _derivative(z2)
    return ShapeCurvatureSpec(lambda x: z1(x) + dz2(x) - 0.5 * z2(x) ** 2, z2, spec.domain,
                              z2_prime=spec.z2_prime, z2_second=spec.z2_second)


def frame_generator(z1: float) -> np.ndarray:
    return np.array([[0.0, 0.0, 1.0, 0.0],
                     [0.0, 0.0, z1, 1.0],
                     [-z1, -1.0, 0.0, 0.0],
                     [-1.0, 0.0, 0.0, 0.0]])


def conservation_defect(K) -> float:
    """``max |I* K^T J* K - I|``; zero for pseudo-orthonormal frames."""
    K = np.asarray(K, dtype=float)
    P = METRIC @ np.swapaxes(K, -1, -2) @ FRAME_GRAM @ K
    return float(np.max(np.abs(P - np.eye(4))))


def reproject(K, iterations: int = 3) -> np.ndarray:
    """Pull ``K`` back onto the pseudo-orthonormal set.

    Symmetric correction ``K <- K (I - F/2)`` with ``F = I* K^T J* K - I``,
    the Lorentzian analogue of iterative Gram-Schmidt orthonormalisation.
    Acting from the right targets the monitored quantity directly, which
    matters when ``K`` is badly conditioned (exponentially growing frames).
    """
    K = np.array(K, dtype=float)
    eye = np.eye(4)
    for _ in range(iterations):
        F = METRIC @ K.T @ FRAME_GRAM @ K - eye
        K = K @ (eye - 0.5 * F)
    return K


@dataclass(frozen=True)
class ReconstructionResult:
    """Curve, frames and drift on a uniform sigma grid.

    ``failed`` is set when the drift exceeds the hard bound; such results
    are only ever attached to a raised ``DriftExceededError``.
    """

    sigma: np.ndarray
    curve: np.ndarray
    frames: np.ndarray
    orthonormality_drift: float
    failed: bool = False
    log_weight: np.ndarray | None = None
    spec: ShapeCurvatureSpec | None = None
    tau0: float = 1.0

    @property
    def Lsim(self) -> np.ndarray:
        return self.frames[:, 0, :]

    def as_curve(self) -> "ReconstructedCurve":
        """The reconstruction as a curve source with derivatives from the frame system."""
        if self.spec is None or self.log_weight is None:
            raise ValueError("result carries no curvature spec")
        return ReconstructedCurve(self)


def _grid(sigma0: float, sigma_end: float, step: float) -> np.ndarray:
    if not step > 0 or not math.isfinite(step):
        raise InvalidParamsError("step must be positive")
    span = sigma_end - sigma0
    n = int(round(abs(span) / step))
    if n == 0 or abs(abs(span) - n * step) > 1e-9 * max(1.0, abs(span)):
        n = int(math.ceil(abs(span) / step - 1e-9))
    if n == 0:
        return np.array([float(sigma0)])
    return np.linspace(sigma0, sigma_end, n + 1)


def _check_frame(K0, tol: float = INITIAL_FRAME_TOL) -> np.ndarray:
    K0 = np.asarray(K0, dtype=float)
    if K0.shape != (4, 4) or not np.all(np.isfinite(K0)):
        raise InvalidParamsError("initial frame must be a finite 4x4 matrix")
    # evaluating the invariant loses about eps * |K|^2, so the bound scales with it
    defect = conservation_defect(K0)
    if defect > tol * max(1.0, float(np.max(np.abs(K0))) ** 2):
        raise InvalidParamsError(f"initial frame is not pseudo-orthonormal (defect {defect:.3e})")
    return K0


def _kahan(total, increment, comp):
    y = increment - comp
    new = total + y
    return new, (new - total) - y


def _integrate(z1: ScalarFunction, z2: ScalarFunction | None, K0, sigma: np.ndarray, tau0: float,
               x0, reproject_every: int | None, drift_fail: float, drift_warn: float):
    """RK4 over ``sigma`` for the state (K, A, gamma). ``z2 = None`` skips the curve."""
    n = len(sigma)
    K = np.empty((n, 4, 4))
    K[0] = K0
    gam = np.zeros((n, 4))
    gam[0] = x0
    h = np.diff(sigma)
    mids = sigma[:-1] + 0.5 * h
    z1n, z1m = z1(sigma), z1(mids)
    if z2 is not None:
        z2n, z2m = z2(sigma), z2(mids)
    A = 0.0
    Avals = np.zeros(n)
    # Kahan compensation terms: the increments are tiny relative to the
    # state, so plain accumulation would put round-off above the O(h^4)
    # truncation error at fine steps.
    cK = np.zeros((4, 4))
    cg = np.zeros(4)
    cA = 0.0
    drift = conservation_defect(K0)
    inv_tau0 = 1.0 / tau0
    with np.errstate(over="raise", invalid="raise"):
        for i in range(n - 1):
            hi = h[i]
            M0, Mm, M1 = frame_generator(z1n[i]), frame_generator(z1m[i]), frame_generator(z1n[i + 1])
            k1 = M0 @ K[i]
            k2 = Mm @ (K[i] + 0.5 * hi * k1)
            k3 = Mm @ (K[i] + 0.5 * hi * k2)
            k4 = M1 @ (K[i] + hi * k3)
            K[i + 1], cK = _kahan(K[i], hi / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), cK)
            if z2 is not None:
                # A is driven by z2 alone, so its stages are Simpson's rule.
                a2 = A + 0.5 * hi * z2n[i]
                a3 = A + 0.5 * hi * z2m[i]
                a4 = A + hi * z2m[i]
                try:
                    w = np.exp(2.0 * np.array([A, a2, a3, a4]))
                except FloatingPointError as exc:
                    raise QuadratureError(f"exp(2 int z2) overflows near sigma={sigma[i]:.17g}") from exc
                g1 = w[0] * K[i, 0]
                g2 = w[1] * (K[i, 0] + 0.5 * hi * k1[0])
                g3 = w[2] * (K[i, 0] + 0.5 * hi * k2[0])
                g4 = w[3] * (K[i, 0] + hi * k3[0])
                gam[i + 1], cg = _kahan(gam[i], inv_tau0 * hi / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4), cg)
                A, cA = _kahan(A, hi / 6.0 * (z2n[i] + 4.0 * z2m[i] + z2n[i + 1]), cA)
                Avals[i + 1] = A
            if reproject_every and (i + 1) % reproject_every == 0:
                K[i + 1] = reproject(K[i + 1])
                cK = np.zeros((4, 4))
            d = conservation_defect(K[i + 1])
            drift = max(drift, d)
            if not np.all(np.isfinite(K[i + 1])) or not np.all(np.isfinite(gam[i + 1])):
                raise QuadratureError(f"integration overflowed near sigma={sigma[i + 1]:.17g}")
            if d > drift_fail:
                res = ReconstructionResult(sigma[: i + 2], gam[: i + 2], K[: i + 2], drift, failed=True)
                raise DriftExceededError(
                    f"conserved-quantity deviation {d:.3e} > {drift_fail:.1e} at sigma={sigma[i + 1]:.17g}",
                    result=res)
    if drift > drift_warn:
        warnings.warn(f"frame drift {drift:.3e} exceeds {drift_warn:.1e}", DriftWarning, stacklevel=3)
    return K, gam, Avals, drift


def integrate_frame_system(spec: ShapeCurvatureSpec, K0=REFERENCE_FRAME, sigma0: float = 0.0,
                           sigma_end: float | None = None, step: float = 1e-3,
                           reproject_every: int | None = None, drift_fail: float = DRIFT_FAIL,
                           drift_warn: float = DRIFT_WARN,
                           frame_tol: float = INITIAL_FRAME_TOL) -> tuple[np.ndarray, np.ndarray, float]:
    """Frames ``K(sigma)`` on the uniform grid from ``sigma0`` to ``sigma_end``.

    Returns ``(sigma, frames, drift)``. ``reproject_every=k`` applies
    :func:`reproject` after every ``k`` steps. ``frame_tol`` bounds the
    conservation defect accepted for ``K0``.
    """
    K0 = _check_frame(K0, frame_tol)
    sigma = _grid(sigma0, sigma0 if sigma_end is None else sigma_end, step)
    spec.check(sigma)
    K, _, _, drift = _integrate(spec.z1, None, K0, sigma, 1.0, np.zeros(4), reproject_every,
                             drift_fail, drift_warn)
    return sigma, K, drift


def transport_frame(z1, K0=REFERENCE_FRAME, sigma_from: float = 0.0, sigma_to: float = 0.0,
                    step: float = 1e-3, frame_tol: float = INITIAL_FRAME_TOL) -> np.ndarray:
    """Carry ``K0`` from ``sigma_from`` to ``sigma_to`` along the frame system.

    Only ``z1`` enters the frame equations, so ``z1`` may be a spec, a
    callable or a constant; it only has to be finite along the path.
    """
    f = z1.z1 if isinstance(z1, ShapeCurvatureSpec) else _vectorize(z1)
    K0 = _check_frame(K0, frame_tol)
    sigma = _grid(sigma_from, sigma_to, step)
    if not np.all(np.isfinite(f(sigma))):
        raise DomainError("z1 is not finite along the transport path")
    K, _, _, _ = _integrate(f, None, K0, sigma, 1.0, np.zeros(4), None, DRIFT_FAIL, math.inf)
    return K[-1]


def reconstruct_curve(spec: ShapeCurvatureSpec, K0=REFERENCE_FRAME, x0=None, sigma0: float = 0.0,
                      sigma_end: float = 1.0, step: float = 1e-3, tau0: float = 1.0,
                      reproject_every: int | None = None, drift_fail: float = DRIFT_FAIL,
                      drift_warn: float = DRIFT_WARN,
                      frame_tol: float = INITIAL_FRAME_TOL) -> ReconstructionResult:
    """Null curve with frame ``K0`` and position ``x0`` at ``sigma0``.

    ``gamma' = exp(2 A) Lsim / tau0`` with ``A(sigma0) = 0``; ``tau0`` is the
    Cartan torsion at ``sigma0`` (default 1).
    """
    if not math.isfinite(tau0) or tau0 <= 0:
        raise InvalidParamsError("tau0 must be positive")
    K0 = _check_frame(K0, frame_tol)
    x0 = np.zeros(4) if x0 is None else as_vector(x0)
    sigma = _grid(sigma0, sigma_end, step)
    spec.check(sigma)
    h = np.diff(sigma)
    spec.check(sigma[:-1] + 0.5 * h)
    K, gam, A, drift = _integrate(spec.z1, spec.z2, K0, sigma, tau0, x0, reproject_every,
                                  drift_fail, drift_warn)
    return ReconstructionResult(sigma, gam, K, drift, log_weight=A, spec=spec, tau0=tau0)


def reconstruct_tau_const(z1, c: float, K0=REFERENCE_FRAME, x0=None, sigma0: float = 0.0,
                          sigma_end: float = 1.0, step: float = 1e-3,
                          domain: tuple[float, float] = (-math.inf, math.inf),
                          **kwargs) -> ReconstructionResult:
    """Reconstruction with ``z2 = 0`` and constant Cartan torsion ``c``.

    Equivalent to :func:`reconstruct_curve` with ``tau0 = c``.
    """
    if not math.isfinite(c) or c == 0:
        raise InvalidParamsError("constant torsion must be finite and nonzero")
    if c < 0:
        raise InvalidParamsError("torsion magnitudes are positive; pass |c|")
    spec = ShapeCurvatureSpec(z1, 0.0, domain)
    return reconstruct_curve(spec, K0, x0, sigma0, sigma_end, step, tau0=c, **kwargs)


def _batch_generator(z1: np.ndarray) -> np.ndarray:
    m = np.zeros((len(z1), 4, 4))
    m[:, 0, 2] = 1.0
    m[:, 1, 2] = z1
    m[:, 1, 3] = 1.0
    m[:, 2, 0] = -z1
    m[:, 2, 1] = -1.0
    m[:, 3, 0] = -1.0
    return m


class ReconstructedCurve(CurveSource):
    """Curve source backed by a :class:`ReconstructionResult`; ``t`` is sigma.

    Off-grid states come from one RK4 step (at most half a grid step) from
    the nearest node. Derivatives then follow exactly from the frame
    equations: ``gamma^(k) = exp(2 A) / tau0 * c_k . K`` with coefficient
    vectors ``c_k`` built from ``z1``, ``z2`` and their derivatives.
    """

    def __init__(self, result: ReconstructionResult):
        self.result = result
        self.spec = result.spec
        self.t_min = float(min(result.sigma[0], result.sigma[-1]))
        self.t_max = float(max(result.sigma[0], result.sigma[-1]))

    def state(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Frames, antiderivative ``A`` and positions at ``t``."""
        r = self.result
        t = np.atleast_1d(np.asarray(t, dtype=float))
        sig = r.sigma
        order = np.argsort(sig)
        j = order[np.clip(np.searchsorted(sig[order], t), 0, len(sig) - 1)]
        jl = order[np.clip(np.searchsorted(sig[order], t) - 1, 0, len(sig) - 1)]
        j = np.where(np.abs(sig[jl] - t) < np.abs(sig[j] - t), jl, j)
        s0 = sig[j]
        d = t - s0
        K, A, g = r.frames[j], r.log_weight[j], r.curve[j]
        if not np.any(d):
            return K.copy(), A.copy(), g.copy()
        z1, z2 = self.spec.z1, self.spec.z2
        mid, end = s0 + 0.5 * d, t
        Mm, M0, M1 = _batch_generator(z1(mid)), _batch_generator(z1(s0)), _batch_generator(z1(end))
        dd = d[:, None, None]
        k1 = M0 @ K
        k2 = Mm @ (K + 0.5 * dd * k1)
        k3 = Mm @ (K + 0.5 * dd * k2)
        k4 = M1 @ (K + dd * k3)
        zs, zm, ze = z2(s0), z2(mid), z2(end)
        w = np.exp(2.0 * np.stack([A, A + 0.5 * d * zs, A + 0.5 * d * zm, A + d * zm], axis=1))
        g_inc = (w[:, 0, None] * K[:, 0] + 2.0 * w[:, 1, None] * (K[:, 0] + 0.5 * d[:, None] * k1[:, 0])
                 + 2.0 * w[:, 2, None] * (K[:, 0] + 0.5 * d[:, None] * k2[:, 0])
                 + w[:, 3, None] * (K[:, 0] + d[:, None] * k3[:, 0]))
        K_new = K + dd / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        A_new = A + d / 6.0 * (zs + 4.0 * zm + ze)
        g_new = g + (d / (6.0 * r.tau0))[:, None] * g_inc
        return K_new, A_new, g_new

    def derivatives(self, t, max_order: int = 4) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_range(t)
        if max_order > 4:
            raise ValueError("derivatives are available up to order 4")
        K, A, g = self.state(t)
        q, q1, p, p1, p2 = self.spec.derivatives(t)
        one, zero = np.ones_like(t), np.zeros_like(t)
        # coefficients on (L, N, W1, W2) of gamma^(k) / (exp(2A) / tau0)
        coeffs = [
            (one, zero, zero, zero),
            (2 * p, zero, one, zero),
            (4 * p * p + 2 * p1 - q, -one, 4 * p, zero),
            (8 * p ** 3 + 12 * p * p1 + 2 * p2 - 6 * p * q - q1, -6 * p, 12 * p * p + 6 * p1 - 2 * q, -one),
        ]
        e = np.exp(2.0 * A) / self.result.tau0
        out = np.empty((len(t), max_order + 1, 4))
        out[:, 0] = g
        for k in range(1, max_order + 1):
            c = np.stack(coeffs[k - 1], axis=1)
            out[:, k] = e[:, None] * np.einsum("mj,mjc->mc", c, K)
        return out
