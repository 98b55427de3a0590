"""Lorentzian linear algebra in Minkowski space-time M^4.

Vectors are plain ``numpy`` arrays whose last axis has length 4; the first
component carries the timelike sign of the metric ``diag(-1, 1, 1, 1)``.
Frames are stored as 4x4 arrays whose rows are ``(L, N, W1, W2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])

#: Gram matrix of a pseudo-orthonormal frame ``(L, N, W1, W2)``.
FRAME_GRAM = np.array(
    [[0.0, 1.0, 0.0, 0.0],
     [1.0, 0.0, 0.0, 0.0],
     [0.0, 0.0, 1.0, 0.0],
     [0.0, 0.0, 0.0, 1.0]]
)

_H = 1.0 / math.sqrt(2.0)

#: Fixed global reference frame. Null rotations act on point coordinates
#: through this frame, and reconstructions default to it as initial condition.
REFERENCE_FRAME = np.array(
    [[_H, 0.0, _H, 0.0],
     [-_H, 0.0, _H, 0.0],
     [0.0, _H, 0.0, _H],
     [0.0, -_H, 0.0, _H]]
)

#: Sign of ``det`` (rows L, N, W1, W2) that counts as positively oriented.
#: Chosen so that ``REFERENCE_FRAME`` is positive; its determinant is -1.
ORIENTATION_SIGN = -1

DEFAULT_FRAME_TOL = 1e-9


def as_vector(u) -> np.ndarray:
    """Return ``u`` as a finite float array with trailing axis 4."""
    arr = np.asarray(u, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected trailing dimension 4, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def lorentzian_dot(u, v) -> np.ndarray | float:
    """Lorentzian inner product ``-u1 v1 + u2 v2 + u3 v3 + u4 v4``.

    Broadcasts over leading axes.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2] + u[..., 3] * v[..., 3]
    return float(out) if np.ndim(out) == 0 else out


def lorentzian_norm(u):
    return np.sqrt(np.abs(lorentzian_dot(u, u)))


class CausalType(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


@dataclass(frozen=True)
class Causality:
    kind: CausalType
    eps: float

    @property
    def is_null(self) -> bool:
        return self.kind is CausalType.NULL


def default_null_eps(u) -> float:
    """Scale-aware nullity tolerance ``1e-9 * max(1, |u|^2)`` (Euclidean norm)."""
    u = np.asarray(u, dtype=float)
    return 1e-9 * max(1.0, float(np.dot(u, u)))


def classify(u, eps: float | None = None) -> Causality:
    u = as_vector(u)
    if eps is None:
        eps = default_null_eps(u)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    q = lorentzian_dot(u, u)
    if abs(q) <= eps:
        kind = CausalType.NULL
    elif q < 0:
        kind = CausalType.TIMELIKE
    else:
        kind = CausalType.SPACELIKE
    return Causality(kind, float(eps))


def frame_gram(K) -> np.ndarray:
    """Gram matrix ``K I* K^T`` of the rows of ``K`` (broadcasts over stacks)."""
    K = np.asarray(K, dtype=float)
    return K @ METRIC @ np.swapaxes(K, -1, -2)


def frame_defect(K) -> float:
    """Max deviation of the rows of ``K`` from pseudo-orthonormality."""
    return float(np.max(np.abs(frame_gram(K) - FRAME_GRAM)))


def orientation(K) -> int:
    return int(np.sign(np.linalg.det(np.asarray(K, dtype=float))))


def is_positively_oriented(K) -> bool:
    return orientation(K) == ORIENTATION_SIGN


@dataclass(frozen=True)
class PseudoOrthonormalFrame:
    """An ordered frame ``(L, N, W1, W2)``.

    ``L`` and ``N`` are null with ``L.N = 1``; ``W1`` and ``W2`` are unit
    spacelike and orthogonal to everything else. The constructor rejects
    frames whose Gram matrix deviates by more than ``tol`` or whose
    orientation is negative.
    """

    L: np.ndarray
    N: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    tol: float = field(default=DEFAULT_FRAME_TOL, compare=False)

    def __post_init__(self):
        for name in ("L", "N", "W1", "W2"):
            vec = as_vector(getattr(self, name))
            if vec.shape != (4,):
                raise ValueError(f"{name} must be a single 4-vector")
            vec = vec.copy()
            vec.flags.writeable = False
            object.__setattr__(self, name, vec)
        defect = frame_defect(self.matrix)
        if defect > self.tol:
            raise ValueError(f"frame is not pseudo-orthonormal (Gram defect {defect:.3e} > {self.tol:.1e})")
        if not is_positively_oriented(self.matrix):
            raise ValueError("frame is not positively oriented")

    @classmethod
    def from_matrix(cls, K, tol: float = DEFAULT_FRAME_TOL) -> "PseudoOrthonormalFrame":
        K = np.asarray(K, dtype=float)
        if K.shape != (4, 4):
            raise ValueError(f"frame matrix must be 4x4, got {K.shape}")
        return cls(K[0], K[1], K[2], K[3], tol=tol)

    @property
    def matrix(self) -> np.ndarray:
        return np.stack([self.L, self.N, self.W1, self.W2])

    def gram(self) -> np.ndarray:
        return frame_gram(self.matrix)


@dataclass(frozen=True)
class NullRotation:
    """Null rotation with parameters ``(lam, epsilon, zeta, theta)``.

    ``frame_matrix()`` maps frame rows ``(L, N, W1, W2)`` to their images.
    ``point_matrix()`` is the coordinate Lorentz map that realises the same
    action on ``REFERENCE_FRAME``.
    """

    lam: float = 1.0
    epsilon: float = 0.0
    zeta: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        vals = (self.lam, self.epsilon, self.zeta, self.theta)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParamsError("null rotation parameters must be finite")
        if self.lam == 0:
            raise InvalidParamsError("null rotation requires lam != 0")

    def frame_matrix(self) -> np.ndarray:
        lam, e, z, th = self.lam, self.epsilon, self.zeta, self.theta
        c, s = math.cos(th), math.sin(th)
        return np.array(
            [[lam, 0.0, 0.0, 0.0],
             [-0.5 * lam * (e * e + z * z), 1.0 / lam, -e, z],
             [lam * (e * c + z * s), 0.0, c, -s],
             [lam * (e * s - z * c), 0.0, s, c]]
        )

    def point_matrix(self) -> np.ndarray:
        # Closed form of (F^-1 R F)^T for F = REFERENCE_FRAME; exact at the identity.
        lam, e, z, th = self.lam, self.epsilon, self.zeta, self.theta
        c, s = math.cos(th), math.sin(th)
        q = e * e + z * z
        l2 = lam * lam
        a = 0.5 * lam * (e * (c - s) + z * (s + c))
        b = 0.5 * lam * (e * (s + c) - z * (c - s))
        p = 0.5 * (e + z)
        m = 0.5 * (e - z)
        return np.array(
            [[(l2 * (q + 2.0) + 2.0) / (4.0 * lam), a, (l2 * (2.0 - q) - 2.0) / (4.0 * lam), b],
             [p, c, -p, s],
             [(l2 * (q + 2.0) - 2.0) / (4.0 * lam), a, (l2 * (2.0 - q) + 2.0) / (4.0 * lam), b],
             [m, -s, -m, c]]
        )

    @classmethod
    def from_frame_matrix(cls, R) -> "NullRotation":
        """Read parameters back from a matrix of the null-rotation form."""
        R = np.asarray(R, dtype=float)
        lam = R[0, 0]
        theta = math.atan2(R[3, 2], R[2, 2]) % (2.0 * math.pi)
        return cls(lam=float(lam), epsilon=float(-R[1, 2]), zeta=float(R[1, 3]), theta=float(theta))


IDENTITY_ROTATION = NullRotation()


def null_rotation_matrix(p: NullRotation) -> np.ndarray:
    return p.frame_matrix()


def rotate_frame(p: NullRotation, K) -> np.ndarray:
    """Image of frame rows ``K`` under the null rotation ``p``."""
    return p.frame_matrix() @ np.asarray(K, dtype=float)


@dataclass(frozen=True)
class SimilarityMap:
    """General similarity ``x -> mu * Lambda x + b`` with ``Lambda`` Lorentz.

    Used for similarities recovered from data, where the linear part is
    known only as a matrix.
    """

    mu: float
    lorentz: np.ndarray
    translation: np.ndarray

    @property
    def linear(self) -> np.ndarray:
        return self.mu * np.asarray(self.lorentz)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation

    __call__ = apply

    def apply_linear(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.linear.T

    def lorentz_defect(self) -> float:
        lam = np.asarray(self.lorentz)
        return float(np.max(np.abs(lam.T @ METRIC @ lam - METRIC)))


@dataclass(frozen=True)
class PSimilarity:
    """p-similarity ``x -> mu * phi(x) + b`` with ``phi`` a null rotation."""

    mu: float = 1.0
    rotation: NullRotation = IDENTITY_ROTATION
    translation: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu == 0:
            raise InvalidParamsError("similarity scale mu must be finite and nonzero")
        b = as_vector(self.translation)
        if b.shape != (4,):
            raise ValueError("translation must be a single 4-vector")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "translation", b)

    @property
    def lorentz(self) -> np.ndarray:
        return self.rotation.point_matrix()

    @property
    def linear(self) -> np.ndarray:
        return self.mu * self.lorentz

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.mu * (x @ self.lorentz.T) + self.translation

    __call__ = apply

    def apply_linear(self, v) -> np.ndarray:
        return self.mu * (np.asarray(v, dtype=float) @ self.lorentz.T)

    def as_map(self) -> SimilarityMap:
        return SimilarityMap(self.mu, self.lorentz, self.translation)

    def require_positive(self):
        if self.mu <= 0:
            raise InvalidParamsError(f"curve-level similarities need mu > 0, got {self.mu}")
        return self


IDENTITY_SIMILARITY = PSimilarity()


def apply_similarity(f: PSimilarity, x) -> np.ndarray:
    return f.apply(x)


def compose_similarity(f: PSimilarity, g: PSimilarity) -> PSimilarity:
    """Return ``f o g``.

    Point matrices compose in the reverse order of frame matrices, so the
    rotation of ``f o g`` has frame matrix ``R_g R_f``.
    """
    R = g.rotation.frame_matrix() @ f.rotation.frame_matrix()
    rot = NullRotation.from_frame_matrix(R)
    b = f.mu * (f.lorentz @ g.translation) + f.translation
    return PSimilarity(f.mu * g.mu, rot, b)


def invert_similarity(f: PSimilarity) -> PSimilarity:
    R_inv = np.linalg.inv(f.rotation.frame_matrix())
    rot = NullRotation.from_frame_matrix(R_inv)
    b = -(rot.point_matrix() @ f.translation) / f.mu
    return PSimilarity(1.0 / f.mu, rot, b)
