"""Leaf conjugacy by averaging along centre leaves.

For a centre leaf with unit-speed parametrisation ``alpha`` (oriented so that
``pi_s`` increases) and ``p = alpha(s)``, ``h(p)`` is the point with

    pi_s h(p) = (1/T) int_0^T pi_s alpha(s + t) dt,     pi_u h(p) = H_u(p),

i.e. the point of the stable line ``H(leaf)`` at the averaged height.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ExtensionRequiredError, InsufficientWindowError
from .foliation import LeafPolyline

T_RESOLUTION = 1e-3
T_SAFETY = 1.1


class ArclengthLeaf:
    """A centre leaf polyline with its arclength parametrisation.

    Orientation is normalised so ``pi_s`` increases along the leaf; ``s`` is
    measured from the first vertex after that normalisation.
    """

    def __init__(self, leaf, projections, leaf_id=0):
        verts = np.asarray(leaf.vertices, dtype=float)
        base = leaf.base_index
        ps = projections.s(verts)
        if ps[-1] < ps[0]:
            verts = verts[::-1]
            base = len(verts) - 1 - base
        self.leaf = LeafPolyline(verts, base, dict(leaf.meta))
        self.projections = projections
        self.leaf_id = leaf_id
        self.s = self.leaf.arclength
        self.ps = projections.s(verts)

    @property
    def length(self):
        return float(self.s[-1])

    def alpha(self, t):
        t = np.asarray(t, dtype=float)
        v = self.leaf.vertices
        return np.stack([np.interp(t, self.s, v[:, 0]), np.interp(t, self.s, v[:, 1])], axis=-1)

    def pi_s_alpha(self, t):
        # pi_s is linear, so interpolating pi_s of the vertices is exact
        return np.interp(t, self.s, self.ps)

    def locate(self, p):
        """Arclength of the vertex of the leaf equal (or nearest) to ``p``."""
        d = np.hypot(*(self.leaf.vertices - np.asarray(p, dtype=float)).T)
        return float(self.s[int(np.argmin(d))])


@dataclass(frozen=True)
class TEstimate:
    threshold: float
    T: float
    n_subsegments: int


@dataclass
class ConjugacySample:
    point: np.ndarray
    image: np.ndarray
    leaf_id: int
    s: float
    T_used: float


def _min_gap(leaves, T):
    worst, count = np.inf, 0
    for L in leaves:
        starts = L.s[L.s + T <= L.s[-1]]
        if len(starts) == 0:
            continue
        gap = L.pi_s_alpha(starts + T) - L.pi_s_alpha(starts)
        worst = min(worst, float(gap.min()))
        count += len(starts)
    return worst, count


def estimate_T(leaves, resolution=T_RESOLUTION, safety=T_SAFETY):
    """Smallest T with ``pi_s`` gap > 1 over every sampled subsegment of length T."""
    leaves = list(leaves)
    hi = max(L.length for L in leaves)
    worst, count = _min_gap(leaves, hi)
    if count == 0 or not worst > 1.0:
        raise InsufficientWindowError("leaves are too short to certify any T")
    lo = 0.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        worst, count = _min_gap(leaves, mid)
        if count > 0 and worst > 1.0:
            hi = mid
        else:
            lo = mid
    return TEstimate(hi, safety * hi, _min_gap(leaves, hi)[1])


def _simpson(fn, a, b, n):
    n += n % 2
    x = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (b - a) / (3.0 * n) * np.dot(w, fn(x))


def leaf_average(leaf, s, T, step=None):
    """``(1/T) int_0^T pi_s alpha(s + t) dt`` by composite Simpson.

    The window is split at the polyline's vertices so every panel sees a
    smooth integrand; each piece uses steps no longer than ``step``
    (default ``T / 200``).
    """
    step = T / 200.0 if step is None else step
    if s < leaf.s[0] - 1e-12 or s + T > leaf.s[-1] + 1e-12:
        raise ExtensionRequiredError(f"leaf must extend a length {T:.3f} beyond s = {s:.3f}")
    inner = leaf.s[(leaf.s > s) & (leaf.s < s + T)]
    knots = np.concatenate([[s], inner, [s + T]])
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b > a:
            total += _simpson(leaf.pi_s_alpha, a, b, max(2, int(np.ceil((b - a) / step))))
    return total / T


def average_along_leaf(approx, leaf, p, T, step=None):
    """The averaged image ``h(p)`` of a point ``p`` on ``leaf``."""
    s = leaf.locate(p)
    avg = leaf_average(leaf, s, T, step)
    return approx.projections.compose(avg, approx.H_u(np.asarray(p, dtype=float)))


def conjugacy_samples(approx, leaves, T, per_leaf=50, step=None):
    """Evaluate h at ``per_leaf`` vertices of each leaf (those with room for T)."""
    out = []
    for L in leaves:
        ok = np.nonzero(L.s + T <= L.s[-1])[0]
        if len(ok) == 0:
            raise ExtensionRequiredError(f"leaf {L.leaf_id} is shorter than T")
        idx = ok[np.unique(np.linspace(0, len(ok) - 1, per_leaf).round().astype(int))]
        pts = L.leaf.vertices[idx]
        hu = approx.H_u(pts)
        for i, p, u in zip(idx, pts, hu):
            avg = leaf_average(L, float(L.s[i]), T, step)
            out.append(ConjugacySample(p, approx.projections.compose(avg, u), L.leaf_id, float(L.s[i]), T))
    return out


def conjugacy_checks(approx, leaves, samples, leaf_tol=1e-5, equiv_tol=1e-4, deriv_slack=1e-6):
    """Leaf-to-leaf, equivariance, monotonicity and injectivity checks on h samples."""
    pr = approx.projections
    lam_u = approx.lin.lambda_u
    by_leaf = {}
    for k, smp in enumerate(samples):
        by_leaf.setdefault(smp.leaf_id, []).append(k)

    # (i) one stable line per leaf
    worst_i, worst_idx = 0.0, None
    labels = {}
    for lid, ks in by_leaf.items():
        u = np.array([pr.u(samples[k].image) for k in ks])
        med = float(np.median(u))
        labels[lid] = med
        dev = np.abs(u - med)
        j = int(np.argmax(dev))
        if dev[j] > worst_i:
            worst_i, worst_idx = float(dev[j]), ks[j]
    leaf_to_leaf = {"max_deviation": worst_i, "tolerance": leaf_tol, "worst_sample": worst_idx,
                    "passed": bool(worst_i <= leaf_tol)}

    # (ii) A maps the line of L to the line of f(L)
    worst_ii = 0.0
    for lid, ks in by_leaf.items():
        pts = np.array([samples[k].point for k in ks])
        target = approx.H_u(approx.model.lift_apply(pts))
        worst_ii = max(worst_ii, float(np.max(np.abs(lam_u * labels[lid] - target))))
    equivariance = {"max_deviation": worst_ii, "tolerance": equiv_tol, "passed": bool(worst_ii <= equiv_tol)}

    # (iii) leafwise derivative of pi_s h
    T = samples[0].T_used if samples else np.nan
    min_deriv = np.inf
    for lid, ks in by_leaf.items():
        s = np.array([samples[k].s for k in ks])
        hs = np.array([pr.s(samples[k].image) for k in ks])
        order = np.argsort(s)
        ds = np.diff(s[order])
        good = ds > 0
        if np.any(good):
            min_deriv = min(min_deriv, float(np.min(np.diff(hs[order])[good] / ds[good])))
    monotone = {"min_derivative": min_deriv, "bound": 1.0 / T - deriv_slack,
                "passed": bool(min_deriv >= 1.0 / T - deriv_slack)}

    # (iv) distinct samples have distinct images
    imgs = np.array([smp.image for smp in samples])
    pts = np.array([smp.point for smp in samples])
    d_img = np.hypot(*(imgs[:, None, :] - imgs[None, :, :]).transpose(2, 0, 1))
    d_pts = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    distinct = d_pts > 1e-12
    min_img = float(d_img[distinct].min()) if np.any(distinct) else np.inf
    injective = {"min_image_separation": min_img, "passed": bool(min_img > 1e-12)}

    checks = {"leaf_to_leaf": leaf_to_leaf, "equivariance": equivariance,
              "monotonicity": monotone, "injectivity": injective}
    checks["passed"] = all(c["passed"] for c in checks.values())
    return checks


def samples_to_rows(samples):
    return [(s.leaf_id, s.s, float(s.point[0]), float(s.point[1]), float(s.image[0]), float(s.image[1]))
            for s in samples]
