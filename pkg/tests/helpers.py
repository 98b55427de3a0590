"""Independent oracles shared by the tests."""
import math

import mpmath as mp
import numpy as np

from nullsim.minkowski import NullRotation, PSimilarity


def random_similarity(rng, mu=None) -> PSimilarity:
    rot = NullRotation(lam=rng.uniform(0.5, 2.0), epsilon=rng.uniform(-1, 1), zeta=rng.uniform(-1, 1),
                       theta=rng.uniform(0, 2 * np.pi))
    return PSimilarity(rng.uniform(0.1, 10.0) if mu is None else mu, rot, rng.normal(size=4))


def example_closed_form_mp(s, dps=30):
    """The printed example curve evaluated in extended precision."""
    with mp.workdps(dps):
        s = mp.mpf(s)
        r2 = mp.sqrt(2)
        return [((s ** 2 + 2) * mp.sinh(s) - 2 * s * mp.cosh(s)) / r2,
                ((s ** 2 + 2) * mp.cosh(s) - 2 * s * mp.sinh(s)) / r2,
                ((s ** 2 - 2) * mp.sin(s) + 2 * s * mp.cos(s)) / r2,
                ((2 - s ** 2) * mp.cos(s) + 2 * s * mp.sin(s)) / r2]


def lsim_n9(sigma):
    sigma = np.asarray(sigma, dtype=float)
    return np.stack([np.cosh(sigma), np.sinh(sigma), np.cos(sigma), np.sin(sigma)], axis=-1) / math.sqrt(2)


def expm_series(A, terms=60):
    """Matrix exponential by plain Taylor series (A small)."""
    out = np.eye(len(A))
    term = np.eye(len(A))
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def reparametrized(alpha, phi):
    """Derivatives of ``alpha(phi(u))`` by Faa di Bruno, given ``phi(u, k)``."""
    def func(u, order):
        a = alpha.derivatives(phi(u, 0), 4)
        p1, p2, p3, p4 = (phi(u, k)[:, None] for k in range(1, 5))
        d = [a[:, 0],
             a[:, 1] * p1,
             a[:, 2] * p1 ** 2 + a[:, 1] * p2,
             a[:, 3] * p1 ** 3 + 3 * a[:, 2] * p1 * p2 + a[:, 1] * p3,
             a[:, 4] * p1 ** 4 + 6 * a[:, 3] * p1 ** 2 * p2 + a[:, 2] * (3 * p2 ** 2 + 4 * p1 * p3)
             + a[:, 1] * p4]
        return d[order]
    return func
