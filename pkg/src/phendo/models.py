"""Torus endomorphisms: a linear model, a perturbed hyperbolic model and the
incoherent skew product built over a Moebius circle map.

Every model works on batches of points (arrays shaped ``(..., 2)``).  The
lift to the plane is a diffeomorphism, so ``lift_inverse`` is always defined.
"""
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import geometry as geo
from .errors import InvalidParameterError, InversionError

TWO_PI = 2.0 * np.pi

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50


def half_angle_pair(y):
    """Return ``(cos(pi*y), sin(pi*y))`` computed without cancellation.

    Near y = 1/2 (mod 1) the cosine is evaluated through the small offset from
    1/2, so ``cos`` vanishes exactly at y = 1/2.  Only ``C**2``, ``S**2`` and
    ``C*S`` are meaningful (they are 1-periodic).
    """
    y = np.asarray(y, dtype=float)
    r = y - np.floor(y + 0.5)  # in [-1/2, 1/2)
    near_half = np.abs(r) > 0.25
    sgn = np.where(r >= 0, 1.0, -1.0)
    d = r - 0.5 * sgn
    C = np.where(near_half, -sgn * np.sin(np.pi * d), np.cos(np.pi * r))
    S = np.where(near_half, sgn * np.cos(np.pi * d), np.sin(np.pi * r))
    return C, S


class MobiusCircleMap:
    """Circle diffeomorphism ``z -> (z + c) / (1 + c z)`` on ``|z| = 1``.

    In the coordinate ``w = tan(pi y)`` the map is the linear map
    ``w -> lam * w`` with ``lam = (1 - c) / (1 + c)``, which gives closed forms
    for every iterate: the k-th iterate is the member of the family with
    multiplier ``lam**k``.  Fixed points are 0 (multiplier ``lam``) and 1/2
    (multiplier ``1/lam``).
    """

    def __init__(self, c=0.6):
        c = float(c)
        if not -1.0 < c < 1.0:
            raise InvalidParameterError(f"Moebius parameter must satisfy |c| < 1, got {c}")
        self.c = c
        self.lam = (1.0 - c) / (1.0 + c)

    def __repr__(self):
        return f"MobiusCircleMap(c={self.c!r})"

    def apply(self, y):
        z = np.exp(1j * TWO_PI * np.asarray(y, dtype=float))
        w = (z + self.c) / (1.0 + self.c * z)
        return geo.cover_to_torus(np.angle(w) / TWO_PI)

    def derivative(self, y):
        c = self.c
        return (1.0 - c * c) / (1.0 + 2.0 * c * np.cos(TWO_PI * np.asarray(y, dtype=float)) + c * c)

    def multiplier(self, k):
        return self.lam ** k

    def iterate_lift(self, y, k):
        """k-th iterate of the lift fixing 0; negative k gives inverse iterates."""
        y = np.asarray(y, dtype=float)
        m = np.floor(y + 0.5)
        r = y - m
        C, S = half_angle_pair(y)
        mu = self.lam ** k
        # atan2 keeps the branch inside (-1/2, 1/2] for r in [-1/2, 1/2)
        out = np.arctan2(mu * S, C) / np.pi
        out = np.where(r == -0.5, -0.5, out)
        return m + out

    def iterate(self, y, k):
        return geo.cover_to_torus(self.iterate_lift(y, k))

    def iterate_derivative(self, y, k):
        C, S = half_angle_pair(y)
        mu = self.lam ** k
        return mu / (C * C + mu * mu * S * S)

    def lift(self, y):
        return self.iterate_lift(y, 1)

    def lift_inverse(self, y):
        return self.iterate_lift(y, -1)


def psi_apply(psi, y):
    return psi.apply(y)


def psi_derivative(psi, y):
    return psi.derivative(y)


def psi_iterate(psi, y, k):
    return psi.iterate(y, int(k))


class EndomorphismModel:
    """Common surface of every torus endomorphism in the package."""

    kind = "abstract"

    def lift_apply(self, p):
        raise NotImplementedError

    def jacobian(self, p):
        raise NotImplementedError

    def linearisation(self):
        return self._lin

    @property
    def matrix(self):
        return self._lin.matrix

    def apply_torus(self, p):
        return geo.cover_to_torus(self.lift_apply(geo.cover_to_torus(p)))

    def displacement(self, p):
        """``lift_apply(p) - A p``; bounded and Z^2-periodic."""
        p = np.asarray(p, dtype=float)
        return self.lift_apply(p) - p @ self.matrix.T

    def distance_to_linear(self, grid_n=64):
        """Sup of ``|lift_apply - A|`` over a grid of the fundamental domain (K0)."""
        g = (np.arange(grid_n) + 0.5) / grid_n
        pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
        return float(np.max(np.hypot(*self.displacement(pts).T)))

    def lift_inverse(self, q, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
        q = np.asarray(q, dtype=float)
        flat = q.reshape(-1, 2)
        a_inv = np.linalg.inv(self.matrix)
        p = flat @ a_inv.T
        scale = np.maximum(1.0, np.hypot(flat[:, 0], flat[:, 1]))
        res = None
        for _ in range(maxiter + 1):
            r = self.lift_apply(p) - flat
            res = np.hypot(r[:, 0], r[:, 1])
            if np.all(res <= tol * scale):
                return p.reshape(q.shape)
            J = self.jacobian(p)
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            dx = (J[:, 1, 1] * r[:, 0] - J[:, 0, 1] * r[:, 1]) / det
            dy = (-J[:, 1, 0] * r[:, 0] + J[:, 0, 0] * r[:, 1]) / det
            p = p - np.stack([dx, dy], axis=-1)
        raise InversionError("Newton inversion of the lift did not converge", float(np.max(res)))

    def describe(self):
        return {"kind": self.kind, "matrix": self.matrix.astype(int).tolist()}


class PerturbedLinearModel(EndomorphismModel):
    """``p -> M p + eps (sin 2 pi y, sin 2 pi x)`` on the plane."""

    kind = "perturbed"

    def __init__(self, matrix, eps=0.0):
        eps = float(eps)
        if eps < 0:
            raise InvalidParameterError("eps must be nonnegative")
        self._lin = geo.classify_linearisation(matrix)
        self.eps = eps

    def __repr__(self):
        return f"{type(self).__name__}({self.matrix.astype(int).tolist()}, eps={self.eps})"

    def lift_apply(self, p):
        p = np.asarray(p, dtype=float)
        out = p @ self.matrix.T
        if self.eps:
            x, y = p[..., 0], p[..., 1]
            out = out + self.eps * np.stack([np.sin(TWO_PI * y), np.sin(TWO_PI * x)], axis=-1)
        return out

    def jacobian(self, p):
        p = np.asarray(p, dtype=float)
        J = np.broadcast_to(self.matrix, p.shape[:-1] + (2, 2)).copy()
        if self.eps:
            J[..., 0, 1] += self.eps * TWO_PI * np.cos(TWO_PI * p[..., 1])
            J[..., 1, 0] += self.eps * TWO_PI * np.cos(TWO_PI * p[..., 0])
        return J

    def lift_inverse(self, q, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
        if self.eps == 0.0:
            return np.asarray(q, dtype=float) @ np.linalg.inv(self.matrix).T
        return super().lift_inverse(q, tol, maxiter)

    def describe(self):
        return {**super().describe(), "eps": self.eps}


class LinearModel(PerturbedLinearModel):
    kind = "linear"

    def __init__(self, matrix):
        super().__init__(matrix, 0.0)


class IncoherentModel(EndomorphismModel):
    """``(x, y) -> (2x + cos(2 pi y) + 1, Psi(y))`` with Psi a Moebius circle map."""

    kind = "incoherent"

    def __init__(self, psi=None):
        self.psi = psi if psi is not None else MobiusCircleMap(0.6)
        self._lin = geo.classify_linearisation([[2, 0], [0, 1]])

    def __repr__(self):
        return f"IncoherentModel({self.psi!r})"

    def lift_apply(self, p):
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        return np.stack([2.0 * x + np.cos(TWO_PI * y) + 1.0, self.psi.lift(y)], axis=-1)

    def jacobian(self, p):
        p = np.asarray(p, dtype=float)
        y = p[..., 1]
        J = np.zeros(p.shape[:-1] + (2, 2))
        J[..., 0, 0] = 2.0
        J[..., 0, 1] = -TWO_PI * np.sin(TWO_PI * y)
        J[..., 1, 1] = self.psi.derivative(y)
        return J

    def lift_inverse(self, q, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
        q = np.asarray(q, dtype=float)
        y = self.psi.lift_inverse(q[..., 1])
        x = 0.5 * (q[..., 0] - np.cos(TWO_PI * y) - 1.0)
        return np.stack([x, y], axis=-1)

    def describe(self):
        return {"kind": self.kind, "c": self.psi.c}


def model_apply(model, p):
    return model.apply_torus(p)


def model_lift(model, p):
    return model.lift_apply(p)


def model_jacobian(model, p):
    return model.jacobian(p)


def lift_inverse(model, q):
    return model.lift_inverse(q)


@dataclass(frozen=True)
class ConeFamily:
    """Cone of directions within ``half_angle`` of ``axis`` at every point.

    ``axis`` is either a constant projective angle or a callable mapping an
    ``(n, 2)`` array of torus points to ``n`` angles.
    """

    axis: Union[float, Callable]
    half_angle: float

    def __post_init__(self):
        if not 0.0 < self.half_angle < 0.5 * np.pi:
            raise InvalidParameterError("cone half-angle must lie in (0, pi/2)")

    def axis_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        if callable(self.axis):
            return np.asarray(self.axis(pts), dtype=float)
        return np.full(pts.shape[:-1], float(self.axis))

    def contains(self, pts, angle):
        return geo.projective_distance(self.axis_at(pts), angle) <= self.half_angle


def torus_grid(grid_n):
    g = np.arange(grid_n) / grid_n
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


def cone_invariance_check(model, cone, grid_n=64, n_dirs=9):
    """Grid test of ``Df(C(p)) inside int C(f(p))`` and of expansion in the cone.

    Returns a dict with the worst angular margin (positive means strictly
    inside) and the smallest stretch of a unit vector in the cone.
    """
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be at least 2")
    pts = torus_grid(grid_n)
    axis = cone.axis_at(pts)
    offsets = cone.half_angle * np.linspace(-1.0, 1.0, n_dirs)
    angles = axis[:, None] + offsets[None, :]
    vecs = geo.direction_vector(angles)  # (n, d, 2)
    J = model.jacobian(pts)
    img = np.einsum("nij,ndj->ndi", J, vecs)
    stretch = np.hypot(img[..., 0], img[..., 1])
    img_angle = geo.direction_angle(img)
    target = cone.axis_at(model.apply_torus(pts))
    dev = np.abs(geo.signed_angle(target[:, None], img_angle)).max(axis=1)
    margin = cone.half_angle - dev
    i_m = int(np.argmin(margin))
    i_s = int(np.argmin(stretch.min(axis=1)))
    worst_margin = float(margin[i_m])
    worst_expansion = float(stretch.min())
    return {
        "worst_margin_angle": worst_margin,
        "worst_margin_point": pts[i_m].tolist(),
        "worst_expansion": worst_expansion,
        "worst_expansion_point": pts[i_s].tolist(),
        "grid_n": grid_n,
        "passed": bool(worst_margin > 0 and worst_expansion > 1),
    }
