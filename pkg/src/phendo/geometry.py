"""Torus/cover arithmetic and integer linearisations.

Points are plain numpy arrays with a trailing axis of length 2, so every
function here works on a single point ``(2,)`` or a batch ``(n, 2)``.
Directions are projective angles in ``[0, pi)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLinearisationError, UnsupportedClassError

HYPERBOLIC = "hyperbolic"
EXPANDING = "expanding"
NON_HYPERBOLIC = "non_hyperbolic"
DEGENERATE = "degenerate"

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class LinearisationData:
    matrix: np.ndarray
    lambda_s: float
    lambda_u: float
    v_s: np.ndarray
    v_u: np.ndarray
    kind: str
    real_spectrum: bool = True

    def as_dict(self):
        return {
            "matrix": self.matrix.astype(int).tolist(),
            "class": self.kind,
            "lambda_s": self.lambda_s,
            "lambda_u": self.lambda_u,
            "v_s": self.v_s.tolist(),
            "v_u": self.v_u.tolist(),
        }


@dataclass(frozen=True)
class ProjectionPair:
    """Linear functionals adapted to a hyperbolic matrix.

    ``pi_s`` kills the unstable eigenline and ``pi_u`` the stable one;
    they are normalised so ``pi_s(v_s) = pi_u(v_u) = 1``.  Hence
    ``p = pi_s(p) v_s + pi_u(p) v_u``.
    """

    pi_s: np.ndarray
    pi_u: np.ndarray
    v_s: np.ndarray
    v_u: np.ndarray

    def s(self, p):
        return np.asarray(p, dtype=float) @ self.pi_s

    def u(self, p):
        return np.asarray(p, dtype=float) @ self.pi_u

    def compose(self, s, u):
        """Point with the given (pi_s, pi_u) coordinates."""
        s = np.asarray(s, dtype=float)[..., None]
        u = np.asarray(u, dtype=float)[..., None]
        return s * self.v_s + u * self.v_u


def _eigenvector(m, lam):
    a, b = m[0]
    c, d = m[1]
    cand1 = np.array([b, lam - a])
    cand2 = np.array([lam - d, c])
    v = cand1 if np.hypot(*cand1) >= np.hypot(*cand2) else cand2
    n = np.hypot(*v)
    if n == 0.0:
        return None
    v = v / n
    # fix the sign so the first nonzero coordinate is positive
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return v


def classify_linearisation(matrix):
    m = np.asarray(matrix)
    if m.shape != (2, 2) or not np.all(np.equal(np.mod(m, 1), 0)):
        raise InvalidLinearisationError(f"expected a 2x2 integer matrix, got {matrix!r}")
    m = m.astype(float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0:
        raise InvalidLinearisationError("zero determinant: not the linearisation of a local diffeomorphism")
    disc = tr * tr - 4.0 * det
    if disc < 0:
        mod = np.sqrt(det)
        e = np.eye(2)
        return LinearisationData(m, mod, mod, e[0], e[1], DEGENERATE, real_spectrum=False)
    root = np.sqrt(disc)
    # stable quadratic formula: big root first, small one through det
    big = 0.5 * (tr + np.copysign(root, tr)) if tr != 0 else 0.5 * root
    small = det / big
    lam_u, lam_s = (big, small) if abs(big) >= abs(small) else (small, big)
    v_u = _eigenvector(m, lam_u)
    v_s = _eigenvector(m, lam_s)
    e = np.eye(2)
    if v_u is None and v_s is None:  # scalar matrix
        v_u, v_s = e[0], e[1]
    elif v_u is None:
        v_u = v_s
    elif v_s is None:
        v_s = v_u
    au, as_ = abs(lam_u), abs(lam_s)
    if as_ < 1 < au:
        kind = HYPERBOLIC
    elif as_ > 1:
        kind = EXPANDING
    elif au > 1 and abs(as_ - 1) <= _UNIT_TOL:
        kind = NON_HYPERBOLIC
    else:
        kind = DEGENERATE
    return LinearisationData(m, float(lam_s), float(lam_u), v_s, v_u, kind)


def projections(lin):
    if lin.kind != HYPERBOLIC:
        raise UnsupportedClassError(f"projections need a hyperbolic matrix, got {lin.kind}")
    rot = lambda v: np.array([-v[1], v[0]])  # noqa: E731
    w_s = rot(lin.v_u)
    w_s = w_s / (w_s @ lin.v_s)
    w_u = rot(lin.v_s)
    w_u = w_u / (w_u @ lin.v_u)
    return ProjectionPair(w_s, w_u, lin.v_s.copy(), lin.v_u.copy())


def cover_to_torus(p):
    q = np.mod(np.asarray(p, dtype=float), 1.0)
    # mod can round up to exactly 1.0 for tiny negative inputs
    return np.where(q >= 1.0, 0.0, q)


def deck_translate(p, v):
    return np.asarray(p, dtype=float) + np.asarray(v, dtype=float)


def torus_distance(a, b):
    d = np.abs(cover_to_torus(a) - cover_to_torus(b))
    d = np.minimum(d, 1.0 - d)
    return np.hypot(d[..., 0], d[..., 1])


def direction_angle(v):
    """Projective angle in [0, pi) of a nonzero vector (or batch)."""
    v = np.asarray(v, dtype=float)
    ang = np.mod(np.arctan2(v[..., 1], v[..., 0]), np.pi)
    return np.where(ang >= np.pi, 0.0, ang)


def direction_vector(angle):
    angle = np.asarray(angle, dtype=float)
    return np.stack([np.cos(angle), np.sin(angle)], axis=-1)


def projective_distance(a, b):
    d = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), np.pi))
    return np.minimum(d, np.pi - d)


def signed_angle(a, b):
    """Signed projective difference b - a, in (-pi/2, pi/2]."""
    d = np.mod(np.asarray(b, dtype=float) - np.asarray(a, dtype=float) + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    return d
