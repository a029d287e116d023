"""Franks semiconjugacy ``A H = H f`` for models with hyperbolic linearisation.

With ``f = A + phi`` and ``H = id + h`` the displacement solves
``A h(p) - h(f p) = phi(p)``.  In the eigenbasis this splits into

    h_u(p) =  sum_{k=0}^{N-1} lam_u^{-(k+1)} phi_u(f^k p)
    h_s(p) = -sum_{k=1}^{N}   lam_s^{k-1}    phi_s(f^{-k} p)

where the backward orbit is taken with the plane diffeomorphism ``f``.
The unstable part only sees the forward orbit and is Z^2-periodic; the
stable part depends on the chosen backward orbit on the cover.
"""
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import UnsupportedClassError

DEFAULT_DEPTH = 30


@dataclass
class SemiconjugacyApprox:
    model: object
    depth: int = DEFAULT_DEPTH
    projections: geo.ProjectionPair = field(init=False)

    def __post_init__(self):
        lin = self.model.linearisation()
        if lin.kind != geo.HYPERBOLIC:
            raise UnsupportedClassError(f"semiconjugacy needs a hyperbolic linearisation, got {lin.kind}")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        self.lin = lin
        self.projections = geo.projections(lin)
        # sup |phi| over the fundamental domain; exact for the sin-perturbation
        sup_phi = self.model.distance_to_linear(64) if getattr(self.model, "eps", 1.0) else 0.0
        self.sup_phi_s = sup_phi * np.hypot(*self.projections.pi_s)
        self.sup_phi_u = sup_phi * np.hypot(*self.projections.pi_u)

    def tails(self):
        """Geometric tail bounds for the stable and unstable components."""
        ls, lu = abs(self.lin.lambda_s), abs(self.lin.lambda_u)
        n = self.depth
        tail_u = self.sup_phi_u * lu ** -(n + 1) / (1.0 - 1.0 / lu)
        tail_s = self.sup_phi_s * ls**n / (1.0 - ls)
        return tail_s, tail_u

    def tail_norm(self):
        ts, tu = self.tails()
        return ts * np.hypot(*self.projections.v_s) + tu * np.hypot(*self.projections.v_u)

    def h_components(self, p):
        p = np.asarray(p, dtype=float)
        pr = self.projections
        ls, lu = self.lin.lambda_s, self.lin.lambda_u
        hu = np.zeros(p.shape[:-1])
        z = geo.cover_to_torus(p)
        for k in range(self.depth):
            hu = hu + lu ** -(k + 1) * pr.u(self.model.displacement(z))
            z = self.model.apply_torus(z)
        hs = np.zeros(p.shape[:-1])
        z = p
        for k in range(1, self.depth + 1):
            z = self.model.lift_inverse(z)
            hs = hs - ls ** (k - 1) * pr.s(self.model.displacement(z))
        return hs, hu

    def displacement(self, p):
        hs, hu = self.h_components(p)
        return self.projections.compose(hs, hu)

    def H(self, p):
        return np.asarray(p, dtype=float) + self.displacement(p)

    def H_s(self, p):
        hs, _ = self.h_components(p)
        return self.projections.s(p) + hs

    def H_u(self, p):
        """``pi_u o H``; needs only the forward orbit."""
        p = np.asarray(p, dtype=float)
        pr = self.projections
        lu = self.lin.lambda_u
        hu = np.zeros(p.shape[:-1])
        z = geo.cover_to_torus(p)
        for k in range(self.depth):
            hu = hu + lu ** -(k + 1) * pr.u(self.model.displacement(z))
            z = self.model.apply_torus(z)
        return pr.u(p) + hu


def franks_displacement(approx, p):
    """``H(p) - p`` together with the norm of its truncation tail."""
    return approx.displacement(p), approx.tail_norm()


def H_s(approx, p):
    return approx.H_s(p)


def H_u(approx, p):
    return approx.H_u(p)


def semiconjugacy_residual(approx, p):
    p = np.asarray(p, dtype=float)
    lhs = approx.H(p) @ approx.lin.matrix.T
    rhs = approx.H(approx.model.lift_apply(p))
    d = lhs - rhs
    return np.hypot(d[..., 0], d[..., 1])


def deck_defect(approx, p, v, component=None):
    """``|H(p + v) - H(p) - v|``; ``component`` restricts to 's' or 'u'."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if component == "u":
        return np.abs(approx.H_u(p + v) - approx.H_u(p) - approx.projections.u(v))
    if component == "s":
        return np.abs(approx.H_s(p + v) - approx.H_s(p) - approx.projections.s(v))
    d = approx.H(p + v) - approx.H(p) - v
    return np.hypot(d[..., 0], d[..., 1])


def displacement_bound(approx, grid_n=32, offset=(0.0, 0.0)):
    """Max ``|H(p) - p|`` over a grid on the unit square shifted by ``offset``, plus the tail."""
    g = np.arange(grid_n) / grid_n
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2) + np.asarray(offset, float)
    h = approx.displacement(pts)
    return float(np.max(np.hypot(h[:, 0], h[:, 1])) + approx.tail_norm())


def analytic_displacement_bound(approx):
    """``sup|phi| * (sum |lam_u|^{-k-1} + sum |lam_s|^{k-1})`` in the eigenbasis."""
    ls, lu = abs(approx.lin.lambda_s), abs(approx.lin.lambda_u)
    pr = approx.projections
    us = approx.sup_phi_u / (lu - 1.0) * np.hypot(*pr.v_u)
    ss = approx.sup_phi_s / (1.0 - ls) * np.hypot(*pr.v_s)
    return float(us + ss)


def image_density(approx, grid_n=64, centre=(0.5, 0.5), radius=1.5, probe_n=40):
    """Surjectivity shadow: largest distance from a probe grid to the H-image of a grid.

    Points of a ``grid_n`` grid on a square of half-width ``radius`` are mapped
    by H; probes cover the square shrunk by the displacement bound, so every
    probe should lie within about the image mesh size of some image point.
    """
    c = np.asarray(centre, dtype=float)
    g = np.linspace(-radius, radius, grid_n)
    pts = c + np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    img = approx.H(pts)
    inner = radius - displacement_bound(approx, 16)
    q = np.linspace(-inner, inner, probe_n)
    probes = c + np.stack(np.meshgrid(q, q, indexing="ij"), axis=-1).reshape(-1, 2)
    d = np.min(np.hypot(*(probes[:, None, :] - img[None, :, :]).transpose(2, 0, 1)), axis=1)
    return {"max_gap": float(d.max()), "mesh": float(g[1] - g[0]), "n_probes": int(len(probes))}
