"""Centre and unstable leaves on the universal cover.

Centre leaves are limits of ``F_n(p) = f^{-n}(seed line through f^n(p))``.
Orbits are carried as a small float part plus an exact integer offset, using
``f(p + v) = f(p) + A v``; without this the n-th forward image has magnitude
``|lam_u|^n`` and the seed segment (length ~ ``|lam_s|^n``) drowns in
rounding error.
"""
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import ConvergenceError, DegenerateLeafError, SeedSelectionError
from .models import ConeFamily, cone_invariance_check, torus_grid

H_MAX = 1e-2
H_MIN = 1e-3
N_MAX = 30
CROSSING_DEPTH = 1e-9


@dataclass
class LeafPolyline:
    vertices: np.ndarray
    base_index: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)

    @property
    def arclength(self):
        d = np.diff(self.vertices, axis=0)
        return np.concatenate([[0.0], np.cumsum(np.hypot(d[:, 0], d[:, 1]))])

    @property
    def base_point(self):
        return self.vertices[self.base_index]

    def __len__(self):
        return len(self.vertices)

    def translated(self, v):
        return LeafPolyline(self.vertices + np.asarray(v, dtype=float), self.base_index, dict(self.meta))

    def validate(self):
        s = self.arclength
        if np.any(np.diff(s) <= 0):
            raise DegenerateLeafError("consecutive vertices coincide")
        if crossing_counts([self], self_check=True)[0, 0]:
            raise DegenerateLeafError("leaf intersects itself")
        return True


@dataclass(frozen=True)
class SeedLine:
    """Family of parallel lines with rational direction ``slope = (a, b)``."""

    slope: tuple
    offset: float = 0.0

    @property
    def direction(self):
        d = np.array(self.slope, dtype=float)
        return d / np.hypot(*d)

    @property
    def angle(self):
        return float(geo.direction_angle(self.direction))


@dataclass
class GrowthReport:
    C_estimate: float
    D_estimate: float
    K_estimate: float
    R_estimate: float
    T_estimate: Optional[float]
    R_bound: float
    alpha: float
    K0: float
    unstable_gap_monotone: bool
    C_by_n: list = field(default_factory=list)

    def as_dict(self):
        return dict(self.__dict__)


# --------------------------------------------------------------------- orbits

class _Lattice:
    def __init__(self, model):
        self.A = np.rint(model.matrix).astype(np.int64)
        self.det = int(round(np.linalg.det(self.A)))
        self.adj = np.array([[self.A[1, 1], -self.A[0, 1]], [-self.A[1, 0], self.A[0, 0]]], dtype=np.int64)

    def split(self, c):
        """Write ``c = A u + r`` with ``r`` a small integer vector (exact)."""
        num = c @ self.adj.T * np.sign(self.det)
        d = abs(self.det)
        u = np.floor_divide(2 * num + d, 2 * d)
        return u, c - u @ self.A.T


def _fold(Y, anchor):
    """Move integer parts of ``Y`` into the offset (shared when ``anchor`` is set)."""
    if anchor is None:
        m = np.floor(Y).astype(np.int64)
    else:
        m = np.floor(Y[anchor]).astype(np.int64)
    return Y - m, m


def forward_offsets(model, Y, c, n, anchor=0):
    """``f^n`` of the points ``Y + c``; returns the new ``(Y, c)``.

    ``c`` is one offset shared by all points (``anchor`` picks the point that
    decides the fold) or, with ``anchor=None``, one offset per point.
    """
    A = np.rint(model.matrix).astype(np.int64)
    Y = np.asarray(Y, dtype=float)
    c = np.asarray(c, dtype=np.int64)
    for _ in range(n):
        Y, m = _fold(model.lift_apply(Y), anchor)
        c = c @ A.T + m
    return Y, c


def backward_offsets(model, Y, c, n, anchor=0, keep=False):
    """``f^{-n}`` of the points ``Y + c`` on the cover, optionally keeping the orbit."""
    lat = _Lattice(model)
    Y = np.asarray(Y, dtype=float)
    c = np.asarray(c, dtype=np.int64)
    orbit = [(Y, c)]
    for _ in range(n):
        u, r = lat.split(c)
        Y, m = _fold(model.lift_inverse(Y + r), anchor)
        c = u + m
        if keep:
            orbit.append((Y, c))
    return orbit if keep else (Y, c)


def _split_point(p):
    p = np.asarray(p, dtype=float)
    m = np.floor(p).astype(np.int64)
    return p - m, m


# ----------------------------------------------------------------- directions

def generic_direction(model):
    """A fixed direction transverse to the unstable eigenline of ``A``."""
    vu = model.linearisation().v_u
    return np.array([-vu[1], vu[0]])


def direction_by_iteration(model, p, mode="center", n=20, v0=None):
    """Centre or unstable direction at cover points ``p`` by iterating Df.

    centre: pull a generic direction at ``f^n(p)`` back with ``(Df^n_p)^{-1}``.
    unstable: push the unstable eigenvector forward along the backward orbit.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if mode == "center":
        v = np.broadcast_to(generic_direction(model) if v0 is None else v0, p.shape).copy()
        orbit = [geo.cover_to_torus(p)]
        for _ in range(n - 1):
            orbit.append(model.apply_torus(orbit[-1]))
        for z in reversed(orbit):
            v = np.linalg.solve(model.jacobian(z), v[..., None])[..., 0]
            v /= np.hypot(v[:, 0], v[:, 1])[:, None]
        return geo.direction_angle(v)
    if mode == "unstable":
        v = np.broadcast_to(model.linearisation().v_u if v0 is None else v0, p.shape).copy()
        # each point carries its own offset; the Jacobian is periodic
        Y, m = _split_point(p)
        orb = backward_offsets(model, Y, m, n, anchor=None, keep=True)
        zs = np.stack([o[0] for o in orb[1:]], axis=1)  # (npts, n, 2)
        for k in range(n - 1, -1, -1):
            v = np.einsum("nij,nj->ni", model.jacobian(zs[:, k]), v)
            v /= np.hypot(v[:, 0], v[:, 1])[:, None]
        return geo.direction_angle(v)
    raise ValueError(f"unknown mode {mode!r}")


def leaf_tangent(model, p, n, seed):
    """Exact tangent angle at ``p`` of the backward-iterated leaf ``F_n(p)``."""
    return direction_by_iteration(model, p, "center", n=n, v0=seed.direction) if n else \
        np.full(np.atleast_2d(p).shape[0], seed.angle)


# ---------------------------------------------------------------------- seeds

def default_cone(model, half_angle=0.3):
    return ConeFamily(float(geo.direction_angle(model.linearisation().v_u)), half_angle)


def check_seed_direction(model, direction, cone=None, grid_n=32):
    """Angular clearance of ``direction`` outside the unstable cone; raises if inside."""
    cone = cone if cone is not None else default_cone(model)
    ang = float(geo.direction_angle(np.asarray(direction, dtype=float)))
    vu = float(geo.direction_angle(model.linearisation().v_u))
    if geo.projective_distance(ang, vu) < 1e-12:
        raise SeedSelectionError("seed direction is the unstable eigendirection")
    axis = cone.axis_at(torus_grid(grid_n))
    margin = float(np.min(geo.projective_distance(axis, ang)) - cone.half_angle)
    if margin <= 0:
        raise SeedSelectionError(f"seed direction lies inside the unstable cone (margin {margin:.3f})")
    return margin


def seed_foliation(model, cone=None, max_den=10, grid_n=32, verify_cone=True):
    """Simplest rational slope transverse to a verified unstable cone.

    Ties in height are broken by closeness to the stable eigendirection, then
    by preferring directions off the coordinate axes.
    """
    cone = cone if cone is not None else default_cone(model)
    if verify_cone:
        rep = cone_invariance_check(model, cone, grid_n)
        if not rep["passed"]:
            raise SeedSelectionError(f"unstable cone is not invariant/expanded: {rep}")
    vs = float(geo.direction_angle(model.linearisation().v_s))
    cands = []
    for a in range(0, max_den + 1):
        for b in range(-max_den, max_den + 1):
            if gcd(a, abs(b)) != 1 or (a == 0 and b != 1):
                continue
            ang = float(geo.direction_angle(np.array([a, b], dtype=float)))
            key = (max(a, abs(b)), round(float(geo.projective_distance(ang, vs)), 9), a == 0 or b == 0)
            cands.append((key, (a, b)))
    for _, slope in sorted(cands):
        try:
            check_seed_direction(model, slope, cone, grid_n)
        except SeedSelectionError:
            continue
        return SeedLine(slope)
    raise SeedSelectionError(f"no rational slope with denominator <= {max_den} clears the cone")


# --------------------------------------------------------------------- leaves

def _trim(verts, base, window):
    d = np.diff(verts, axis=0)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(d[:, 0], d[:, 1]))])
    s = s - s[base]
    lo = np.searchsorted(s, -window, side="right") - 1
    hi = np.searchsorted(s, window, side="left")
    if lo < 0 or hi >= len(s):
        return None
    return verts[lo:hi + 1], base - lo


def _thin(verts, base, h_min, h_max):
    keep = [0]
    for i in range(1, len(verts) - 1):
        if i == base:
            keep.append(i)
            continue
        d_cur = np.hypot(*(verts[i] - verts[keep[-1]]))
        d_next = np.hypot(*(verts[i + 1] - verts[keep[-1]]))
        if d_cur < h_min and d_next <= h_max and i + 1 != base:
            continue
        keep.append(i)
    keep.append(len(verts) - 1)
    keep = np.array(keep)
    return verts[keep], int(np.searchsorted(keep, base))


def _map_seed(model, Yq, cq, direction, ts, n):
    pts = Yq[None, :] + ts[:, None] * direction[None, :]
    anchor = int(np.argmin(np.abs(ts)))
    Y, c = backward_offsets(model, pts, cq, n, anchor=anchor)
    return Y + c


def backward_leaf(model, p, n, window=1.0, seed=None, h_max=H_MAX, h_min=H_MIN):
    """``F_n(p)``: pull the seed line through ``f^n(p)`` back ``n`` times.

    ``window`` is the arclength kept on each side of ``p`` in the output.
    Vertices are exact preimages of seed points, refined until every edge is
    at most ``h_max``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    seed = seed if seed is not None else seed_foliation(model, verify_cone=False)
    p = np.asarray(p, dtype=float)
    Y0, m0 = _split_point(p)
    Yq, cq = forward_offsets(model, Y0[None, :], m0, n)
    Yq = Yq[0]
    d = seed.direction
    ls = abs(model.linearisation().lambda_s) if model.linearisation().kind == geo.HYPERBOLIC else 0.5
    half = 1.5 * window * ls**n
    for _ in range(60):
        ts = np.linspace(-half, half, 129)
        verts = _map_seed(model, Yq, cq, d, ts, n)
        for _ in range(40):
            e = np.hypot(*np.diff(verts, axis=0).T)
            bad = np.nonzero(e > h_max)[0]
            if len(bad) == 0:
                break
            mids = 0.5 * (ts[bad] + ts[bad + 1])
            new = _map_seed(model, Yq, cq, d, mids, n)
            ts = np.insert(ts, bad + 1, mids)
            verts = np.insert(verts, bad + 1, new, axis=0)
        else:
            raise DegenerateLeafError("resampling did not converge (fold-over?)")
        base = int(np.argmin(np.abs(ts)))
        out = _trim(verts, base, window)
        if out is not None:
            verts, base = _thin(*out, h_min, h_max)
            if np.any(np.hypot(*np.diff(verts, axis=0).T) == 0):
                raise DegenerateLeafError("repeated vertex after resampling")
            # the base vertex is f^{-n}(f^n p), equal to p up to rounding
            verts[base] = p
            return LeafPolyline(verts, base, {"n": n, "seed": list(seed.slope), "window": window})
        half *= 2.0
    raise DegenerateLeafError("seed segment could not be grown to cover the window")


def point_polyline_distance(points, poly):
    """Distance from each point to the polyline with vertices ``poly``."""
    points = np.atleast_2d(points)
    a = poly[:-1][None, :, :]
    b = poly[1:][None, :, :]
    q = points[:, None, :]
    ab = b - a
    denom = np.maximum(np.einsum("...i,...i", ab, ab), 1e-300)
    t = np.clip(np.einsum("...i,...i", q - a, ab) / denom, 0.0, 1.0)
    proj = a + t[..., None] * ab
    d = np.hypot(*(q - proj).transpose(2, 0, 1))
    return d.min(axis=1)


def leaf_sup_distance(la, lb, core=0.9):
    """Symmetric sup distance between two leaves over the inner ``core`` part.

    Only vertices within ``core`` times the shorter half-window of their base
    point enter, so trimming at slightly different places does not count.
    """
    def inner(leaf, radius):
        s = leaf.arclength - leaf.arclength[leaf.base_index]
        return leaf.vertices[np.abs(s) <= radius]

    def half(leaf):
        s = leaf.arclength
        return min(s[leaf.base_index], s[-1] - s[leaf.base_index])

    r = core * min(half(la), half(lb))
    return float(max(point_polyline_distance(inner(la, r), lb.vertices).max(),
                     point_polyline_distance(inner(lb, r), la.vertices).max()))


def center_leaf(model, p, window=1.0, tol=1e-4, seed=None, n_start=1, n_max=N_MAX):
    """Backward-iterate until successive leaves agree within ``tol`` (sup distance)."""
    seed = seed if seed is not None else seed_foliation(model, verify_cone=False)
    prev = backward_leaf(model, p, n_start, window, seed)
    gap = np.inf
    for n in range(n_start + 1, n_max + 1):
        cur = backward_leaf(model, p, n, window, seed)
        gap = leaf_sup_distance(prev, cur)
        if gap < tol:
            cur.meta["gap"] = gap
            return cur
        prev = cur
    raise ConvergenceError(f"centre leaf did not converge by n = {n_max}", gap)


def center_leaves(model, points, window=1.0, tol=1e-4, seed=None):
    """Centre leaves through many points, all built with a common depth.

    A common ``n`` makes the set a family of leaves of the single foliation
    ``F_n``, which is what the no-crossing check needs.
    """
    seed = seed if seed is not None else seed_foliation(model, verify_cone=False)
    points = np.atleast_2d(points)
    n = 1
    for p in points[: min(len(points), 5)]:
        n = max(n, center_leaf(model, p, window, tol, seed).meta["n"])
    leaves = [backward_leaf(model, p, n, window, seed) for p in points]
    for leaf in leaves:
        leaf.meta["tol"] = tol
    return leaves


def unstable_field(model, pts, heading, n=20):
    ang = direction_by_iteration(model, pts, "unstable", n)
    v = geo.direction_vector(ang)
    flip = np.einsum("ni,ni->n", v, heading) < 0
    v[flip] *= -1
    return v


def unstable_leaf(model, p, length=1.0, step=1e-2, n=20):
    """RK4 integration of the unstable field for ``length`` on each side of ``p``."""
    return unstable_leaves(model, np.atleast_2d(p), length, step, n)[0]


def unstable_leaves(model, points, length=1.0, step=1e-2, n=20):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n_steps = int(np.ceil(length / step))
    h = length / n_steps
    v0 = geo.direction_vector(direction_by_iteration(model, points, "unstable", n))
    sides = []
    for sign in (1.0, -1.0):
        z = points.copy()
        head = sign * v0
        path = [z.copy()]
        for _ in range(n_steps):
            k1 = unstable_field(model, z, head, n)
            k2 = unstable_field(model, z + 0.5 * h * k1, k1, n)
            k3 = unstable_field(model, z + 0.5 * h * k2, k2, n)
            k4 = unstable_field(model, z + h * k3, k3, n)
            z = z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            head = k4
            path.append(z.copy())
        sides.append(np.stack(path, axis=1))
    out = []
    for i in range(len(points)):
        verts = np.concatenate([sides[1][i][::-1], sides[0][i][1:]])
        out.append(LeafPolyline(verts, n_steps, {"kind": "unstable", "length": length}))
    return out


# ------------------------------------------------------------- intersections

def _segments(leaves):
    segs, owner = [], []
    for i, leaf in enumerate(leaves):
        v = leaf.vertices
        segs.append(np.concatenate([v[:-1], v[1:]], axis=1))
        owner.append(np.full(len(v) - 1, i))
    return np.concatenate(segs), np.concatenate(owner)


def _orient(a, b, c):
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _candidate_pairs(segs, cell):
    lo = np.floor(np.minimum(segs[:, :2], segs[:, 2:]) / cell).astype(np.int64)
    hi = np.floor(np.maximum(segs[:, :2], segs[:, 2:]) / cell).astype(np.int64)
    ids, keys = [], []
    for dx in range(int((hi - lo)[:, 0].max()) + 1):
        for dy in range(int((hi - lo)[:, 1].max()) + 1):
            ok = (lo[:, 0] + dx <= hi[:, 0]) & (lo[:, 1] + dy <= hi[:, 1])
            idx = np.nonzero(ok)[0]
            ids.append(idx)
            keys.append((lo[idx, 0] + dx) * 1_000_003 + (lo[idx, 1] + dy))
    ids = np.concatenate(ids)
    keys = np.concatenate(keys)
    order = np.lexsort((ids, keys))
    ids, keys = ids[order], keys[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    ends = np.r_[starts[1:], len(keys)]
    ii, jj = [], []
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        grp = ids[s:e]
        a, b = np.triu_indices(len(grp), 1)
        ii.append(grp[a])
        jj.append(grp[b])
    if not ii:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.stack([np.concatenate(ii), np.concatenate(jj)], axis=1)
    return np.unique(np.sort(pairs, axis=1), axis=0)


def crossing_counts(leaves, others=None, self_check=False, depth=CROSSING_DEPTH, cell=0.05):
    """Matrix of transverse crossing counts between polylines.

    With ``others`` the result is ``len(leaves) x len(others)``; otherwise it
    is the symmetric matrix for ``leaves`` (diagonal only if ``self_check``).
    Crossings shallower than ``depth`` are treated as near-misses.
    """
    family = list(leaves) + (list(others) if others is not None else [])
    segs, owner = _segments(family)
    pairs = _candidate_pairs(segs, cell)
    i, j = pairs[:, 0], pairs[:, 1]
    same = owner[i] == owner[j]
    if self_check:
        adjacent = np.abs(i - j) <= 1
        i, j = i[~same | ~adjacent], j[~same | ~adjacent]
        keep = owner[i] == owner[j]
    else:
        keep = ~same
    i, j = i[keep], j[keep]
    if others is not None:
        nl = len(leaves)
        cross_fam = (owner[i] < nl) != (owner[j] < nl)
        i, j = i[cross_fam], j[cross_fam]
    P1, P2, Q1, Q2 = segs[i, :2], segs[i, 2:], segs[j, :2], segs[j, 2:]
    o1, o2 = _orient(Q1, Q2, P1), _orient(Q1, Q2, P2)
    o3, o4 = _orient(P1, P2, Q1), _orient(P1, P2, Q2)
    hit = ((o1 >= 0) != (o2 >= 0)) & ((o3 >= 0) != (o4 >= 0))
    lq = np.hypot(*(Q2 - Q1).T)
    lp = np.hypot(*(P2 - P1).T)
    # near-miss: one segment lies within ``depth`` of the other's line
    # (tangential contact).  Transverse hits through a vertex still count; the
    # half-open sign rule above counts them once.
    deep = (np.maximum(np.abs(o1), np.abs(o2)) / lq > depth) & (np.maximum(np.abs(o3), np.abs(o4)) / lp > depth)
    hit &= deep
    a, b = owner[i[hit]], owner[j[hit]]
    if others is not None:
        nl = len(leaves)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        out = np.zeros((nl, len(others)), dtype=int)
        np.add.at(out, (lo, hi - nl), 1)
        return out
    out = np.zeros((len(family), len(family)), dtype=int)
    np.add.at(out, (a, b), 1)
    if not self_check:
        out = out + out.T
    return out


def _refined(model, leaf, seed, h_max):
    m = leaf.meta
    return backward_leaf(model, leaf.base_point, m["n"], m["window"], seed, h_max, h_max / 10.0)


def no_crossing_check(leaves, model=None, seed=None, max_refine=3):
    """Count crossings between leaves of one backward-iterated foliation.

    Leaves closer together than their chord sag (about curvature * h^2 / 8)
    can interleave as polylines without the curves crossing.  When ``model``
    is given, offending pairs are rebuilt with edges four times shorter, up
    to ``max_refine`` times, and recounted; a pair fails only if it still
    crosses at the finest resolution.
    """
    leaves = list(leaves)
    counts = np.triu(crossing_counts(leaves), 1)
    bad = [tuple(x) for x in np.argwhere(counts > 0)]
    refined = []
    if model is not None and bad:
        seed = seed if seed is not None else seed_foliation(model, verify_cone=False)
        still = []
        for i, j in bad:
            a, b, h = leaves[i], leaves[j], H_MAX
            for _ in range(max_refine):
                h /= 4.0
                a, b = _refined(model, a, seed, h), _refined(model, b, seed, h)
                c = int(crossing_counts([a], [b])[0, 0])
                if c == 0:
                    break
            counts[i, j] = c
            refined.append({"pair": [int(i), int(j)], "h_max": h, "crossings": c})
            if c:
                still.append((i, j))
        bad = still
    return {"n_leaves": len(leaves), "crossings": int(counts.sum()),
            "offending_pairs": [list(map(int, x)) for x in bad[:10]], "refined_pairs": refined,
            "passed": bool(len(bad) == 0)}


def product_structure_check(centers, unstables):
    counts = crossing_counts(centers, unstables)
    bad = np.argwhere(counts != 1)
    return {
        "n_centers": len(centers),
        "n_unstables": len(unstables),
        "min_count": int(counts.min()),
        "max_count": int(counts.max()),
        "offending_pairs": bad.tolist()[:10],
        "passed": bool(len(bad) == 0),
    }


# ---------------------------------------------------------------- diagnostics

def invariance_gap(model, leaf, window=None, tol=1e-4, seed=None):
    """Distance between ``f(leaf)`` and the centre leaf through ``f(base)``."""
    img = LeafPolyline(model.lift_apply(leaf.vertices), leaf.base_index)
    w = window if window is not None else leaf.meta.get("window", 1.0)
    other = center_leaf(model, img.base_point, w, tol, seed)
    # f(leaf) is longer or shorter than the window; compare where both exist
    s = other.arclength - other.arclength[other.base_index]
    inner = other.vertices[np.abs(s) <= 0.9 * w]
    si = img.arclength - img.arclength[img.base_index]
    img_inner = img.vertices[np.abs(si) <= 0.9 * min(w, si[-1], -si[0])]
    return float(max(point_polyline_distance(img_inner, other.vertices).max(),
                     point_polyline_distance(inner, img.vertices).max()
                     if np.ptp(si) >= np.ptp(s) else 0.0))


def tangent_convergence(model, p, n_range=range(3, 11), seed=None, n_ref=40):
    """Projective error of the ``F_n`` tangent at ``p`` against E^c, per n."""
    seed = seed if seed is not None else seed_foliation(model, verify_cone=False)
    ref = direction_by_iteration(model, p, "center", n=n_ref)
    errs = np.array([float(geo.projective_distance(leaf_tangent(model, p, n, seed), ref)[0]) for n in n_range])
    ratios = errs[1:] / errs[:-1]
    return {"errors": errs.tolist(), "mean_ratio": float(np.exp(np.mean(np.log(ratios))))}


def _pi_u_diameter(model, leaf, n_max, pr):
    Y, m = _split_point(leaf.vertices)
    c = m[leaf.base_index]
    Y = leaf.vertices - c
    out = []
    for n in range(n_max + 1):
        u = pr.u(Y)
        out.append(float(u.max() - u.min()))
        Y, c = forward_offsets(model, Y, c, 1, anchor=leaf.base_index)
    return out


def _unit_neighbourhood_area(poly, rng, n_samples=20000):
    lo = poly.min(axis=0) - 1.0
    hi = poly.max(axis=0) + 1.0
    pts = lo + (hi - lo) * rng.random((n_samples, 2))
    inside = np.zeros(n_samples, dtype=bool)
    for chunk in np.array_split(np.arange(n_samples), max(1, n_samples // 2000)):
        inside[chunk] = point_polyline_distance(pts[chunk], poly) < 1.0
    return float(np.prod(hi - lo) * inside.mean())


def growth_diagnostics(model, centers, unstables, n_max=10, seed=0, R_leaves=None, T_estimate=None):
    """Numerical shadows of the boundedness and growth constants C, D, K, R."""
    pr = geo.projections(model.linearisation())
    per_n = np.zeros(n_max + 1)
    seed_line = seed_foliation(model, verify_cone=False)
    for leaf in centers:
        # f^k of an F_N leaf is an F_{N-k} leaf only while k <= N, so rebuild
        # the segment deep enough that every pushed image stays a centre piece
        s = leaf.arclength
        half = float(min(s[leaf.base_index], s[-1] - s[leaf.base_index]))
        deep = backward_leaf(model, leaf.base_point, leaf.meta.get("n", 0) + 2 * n_max, half, seed_line)
        per_n = np.maximum(per_n, _pi_u_diameter(model, deep, n_max, pr))
    C = float(per_n.max())
    D = float(max(np.ptp(pr.s(u.vertices)) for u in unstables))

    monotone = True
    for u in unstables:
        s = u.arclength - u.arclength[u.base_index]
        top = s[-1]
        for ell in (0.25 * top, 0.5 * top):
            j1 = np.searchsorted(s, ell)
            j2 = np.searchsorted(s, 2 * ell) if 2 * ell <= top else len(s) - 1
            g1 = abs(pr.u(u.vertices[j1]) - pr.u(u.base_point))
            g2 = abs(pr.u(u.vertices[j2]) - pr.u(u.base_point))
            monotone &= bool(g2 > g1)

    rng = np.random.default_rng(seed)
    ratios = []
    for u in unstables[:5]:
        ratios.append(_unit_neighbourhood_area(u.vertices, rng) / u.arclength[-1])
    K = float(min(ratios))

    lin = model.linearisation()
    A_inv = np.linalg.inv(lin.matrix)
    R, alpha = 0.0, 0.0
    K0 = model.distance_to_linear()
    for leaf in (R_leaves if R_leaves is not None else centers):
        n = leaf.meta.get("n", 0)
        d = np.linalg.matrix_power(A_inv, n) @ seed_line.direction
        d = d / np.hypot(*d)
        normal = np.array([-d[1], d[0]])
        off = leaf.vertices @ normal
        R = max(R, 0.5 * float(np.ptp(off)))
        d1 = A_inv @ d
        alpha = max(alpha, abs(np.linalg.det(A_inv)) / np.hypot(*d1))
    R_bound = K0 / (1.0 - alpha) if alpha < 1 else np.inf
    return GrowthReport(C, D, K, R, T_estimate, float(R_bound), float(alpha), float(K0), monotone, per_n.tolist())


def leaves_to_rows(leaves):
    """CSV rows ``(leaf_id, t, x, y)``, t being arclength from the first vertex."""
    rows = []
    for i, leaf in enumerate(leaves):
        s = leaf.arclength
        for t, (x, y) in zip(s, leaf.vertices):
            rows.append((i, float(t), float(x), float(y)))
    return rows
