"""Closed-form null curves: self-similar cases, null helices, and the
quadratically weighted example curve.

Every curve here is a finite sum ``Re(P(t) exp(lam t))`` per component,
with ``P`` a complex polynomial, so derivatives of any order are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .curves import AnalyticCurve
from .errors import InvalidParamsError

_SQRT2 = math.sqrt(2.0)


class ExpPolyCurve:
    """Vector function with components ``sum_j Re(p_j(t) exp(lam_j t))``."""

    def __init__(self, components):
        # components: 4 lists of (coeffs, lam), coeffs in increasing degree
        if len(components) != 4:
            raise ValueError("need exactly 4 components")
        self.components = [[(np.asarray(c, dtype=complex), complex(lam)) for c, lam in comp]
                           for comp in components]

    def __call__(self, t, order: int = 0) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((len(t), 4))
        for i, comp in enumerate(self.components):
            for coeffs, lam in comp:
                c = coeffs
                for _ in range(order):
                    # d/dt [p e^{lam t}] = (p' + lam p) e^{lam t}
                    c = P.polyadd(P.polyder(c), lam * c) if len(c) > 1 else lam * c
                out[:, i] += np.real(P.polyval(t, c) * np.exp(lam * t))
        return out

    def scaled(self, factor: float) -> "ExpPolyCurve":
        return ExpPolyCurve([[(factor * c, lam) for c, lam in comp] for comp in self.components])

    def curve(self, t_min: float, t_max: float, name: str = "curve") -> AnalyticCurve:
        return AnalyticCurve(lambda t, k: self(t, k), t_min, t_max, name)


def _exp(coef, lam):
    return ([coef], lam)


@dataclass(frozen=True)
class CatalogParams:
    a: float = 0.0
    b: float = 0.0
    c: float = 1.0
    kappa: float = 0.0
    tau: float = 1.0

    @property
    def q1(self) -> float:
        return math.sqrt(-self.a + math.hypot(self.a, 1.0))

    @property
    def q2(self) -> float:
        return math.sqrt(self.a + math.hypot(self.a, 1.0))

    @property
    def w1(self) -> float:
        return 2.0 * self.b + 1.0

    @property
    def w2(self) -> float:
        return 2.0 * self.b - 1.0

    @property
    def m1(self) -> float:
        return 2.0 * self.b + self.q1

    @property
    def m2(self) -> float:
        return 2.0 * self.b - self.q1

    @property
    def v(self) -> float:
        return math.sqrt(math.hypot(self.kappa, self.tau) - self.kappa)

    @property
    def r(self) -> float:
        return math.sqrt(math.hypot(self.kappa, self.tau) + self.kappa)


def _hyperbolic_circular(p: float, q: float, amp: float) -> ExpPolyCurve:
    """``amp * (sinh(p t)/p, cosh(p t)/p, sin(q t)/q, -cos(q t)/q)``."""
    hp, hq = amp / (2.0 * p), amp / q
    return ExpPolyCurve([
        [_exp(hp, p), _exp(-hp, -p)],
        [_exp(hp, p), _exp(hp, -p)],
        [_exp(-1j * hq, 1j * q)],
        [_exp(-hq, 1j * q)],
    ])


def _growing(p: float, q: float, b: float, amp: float, lo: float, hi: float) -> ExpPolyCurve:
    """Shared shape of the two cases with nonzero ``b``.

    ``amp * (e^{lo t}/lo + e^{hi t}/hi, e^{lo t}/lo - e^{hi t}/hi,
    e^{2bt}(4b cos qt + 2q sin qt)/(4b^2+q^2), e^{2bt}(-2q cos qt + 4b sin qt)/(4b^2+q^2))``.
    """
    den = 4.0 * b * b + q * q
    rate = complex(2.0 * b, q)
    # Re((A - iB) e^{i q t}) = A cos + B sin
    return ExpPolyCurve([
        [_exp(amp / lo, lo), _exp(amp / hi, hi)],
        [_exp(amp / lo, lo), _exp(-amp / hi, hi)],
        [_exp(amp * complex(4.0 * b, -2.0 * q) / den, rate)],
        [_exp(amp * complex(-2.0 * q, -4.0 * b) / den, rate)],
    ])


def self_similar_expr(case: int, params: CatalogParams) -> ExpPolyCurve:
    """Closed form of self-similar case ``case`` (1-4) as printed."""
    a, b, c = params.a, params.b, params.c
    if case == 1:
        if c == 0:
            raise InvalidParamsError("case 1 needs c != 0")
        return _hyperbolic_circular(1.0, 1.0, 1.0 / (c * _SQRT2))
    if case == 2:
        if b == 0:
            raise InvalidParamsError("case 2 needs b != 0")
        if params.w1 == 0 or params.w2 == 0:
            raise InvalidParamsError("case 2 is singular at b = +-1/2")
        return _growing(1.0, 1.0, b, 1.0 / (2.0 * _SQRT2), params.w1, params.w2)
    if case == 3:
        # a = 0 is accepted: q1 = q2 = 1 and the formula reduces to case 1.
        if c == 0:
            raise InvalidParamsError("case 3 needs c != 0")
        return _hyperbolic_circular(params.q1, params.q2, 1.0 / (c * _SQRT2))
    if case == 4:
        if a == 0 or b == 0:
            raise InvalidParamsError("case 4 needs a != 0 and b != 0")
        if params.m1 == 0 or params.m2 == 0:
            raise InvalidParamsError("case 4 is singular at 2b = +-q1")
        return _growing(params.q1, params.q2, b, 1.0 / (2.0 * _SQRT2), params.m1, params.m2)
    raise InvalidParamsError(f"unknown self-similar case {case!r}")


def self_similar_case(case: int, params: CatalogParams, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    out = self_similar_expr(case, params)(np.atleast_1d(sigma))
    return out[0] if sigma.ndim == 0 else out


def self_similar_curve(case: int, params: CatalogParams, t_min: float, t_max: float) -> AnalyticCurve:
    return self_similar_expr(case, params).curve(t_min, t_max, name=f"case{case}")


def helix_expr(kappa: float, tau: float) -> ExpPolyCurve:
    if tau == 0 or not math.isfinite(tau) or not math.isfinite(kappa):
        raise InvalidParamsError("null helix needs finite kappa and tau != 0")
    p = CatalogParams(kappa=kappa, tau=tau)
    v, r = p.v, p.r
    if v == 0 or r == 0:
        raise InvalidParamsError("degenerate helix parameters")
    return _hyperbolic_circular(v, r, 1.0 / math.sqrt(v * v + r * r))


def null_helix(kappa: float, tau: float, s) -> np.ndarray:
    """Null helix with Cartan curvatures ``kappa`` and ``|tau|``, pseudo-arc ``s``."""
    s = np.asarray(s, dtype=float)
    out = helix_expr(kappa, tau)(np.atleast_1d(s))
    return out[0] if s.ndim == 0 else out


def helix_curve(kappa: float, tau: float, t_min: float, t_max: float) -> AnalyticCurve:
    return helix_expr(kappa, tau).curve(t_min, t_max, name="helix")


def example_expr() -> ExpPolyCurve:
    """Curve whose tangent is ``sigma^2 (cosh, sinh, cos, sin)(sigma) / sqrt 2``."""
    h = 0.5 / _SQRT2
    g = 1.0 / _SQRT2
    plus = [2.0, -2.0, 1.0]    # sigma^2 - 2 sigma + 2
    minus = [2.0, 2.0, 1.0]    # sigma^2 + 2 sigma + 2
    return ExpPolyCurve([
        [([h * x for x in plus], 1.0), ([-h * x for x in minus], -1.0)],
        [([h * x for x in plus], 1.0), ([h * x for x in minus], -1.0)],
        # (s^2 - 2) sin s + 2 s cos s
        [(g * np.array([0.0, 2.0, -1j]) + g * np.array([2j, 0.0, 0.0]), 1j)],
        # (2 - s^2) cos s + 2 s sin s
        [(g * np.array([2.0, -2j, -1.0]), 1j)],
    ])


def example_curve(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    out = example_expr()(np.atleast_1d(sigma))
    return out[0] if sigma.ndim == 0 else out


def example_source(t_min: float, t_max: float) -> AnalyticCurve:
    return example_expr().curve(t_min, t_max, name="example")
