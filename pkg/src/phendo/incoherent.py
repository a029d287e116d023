"""Analysis of the incoherent skew product ``(2x + cos(2 pi y) + 1, Psi(y))``.

The two solutions of ``u(Psi(y)) - 2 u(y) = cos(2 pi y) + 1`` are

    beta(y)  =  1/2 sum_{k>=1} 2^k    (cos(2 pi Psi^{-k}(y)) + 1)
    gamma(y) = -1/2 sum_{k>=0} 2^{-k} (cos(2 pi Psi^{k}(y)) + 1)

and ``(beta'(y), 1)``, ``(gamma'(y), 1)`` span the unstable and centre bundles.

Every term is evaluated through the conjugacy ``tan(pi Psi^k(y)) = lam^k
tan(pi y)``: ``cos(2 pi Psi^k y) + 1 = 2 C^2 / (C^2 + lam^{2k} S^2)`` with
``C, S = cos(pi y), sin(pi y)``.  Summing ``cos(2 pi u) + 1`` at the iterate
itself would lose every digit once ``2^k`` multiplies a rounding error near
``u = 1/2``.
"""
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import CertificateError, InsufficientDepthError, InvalidParameterError, SingularInputError
from .models import TWO_PI, IncoherentModel, MobiusCircleMap, half_angle_pair, torus_grid

DEFAULT_DEPTH = 40
DEFAULT_DELTA = 0.02


@dataclass(frozen=True)
class SeriesTruncation:
    """Partial sum of one of the series together with a bound on the omitted tail."""

    value: np.ndarray
    tail_bound: np.ndarray
    depth: int


@dataclass(frozen=True)
class BundleSample:
    point: np.ndarray
    e_u: float
    e_c: float


@dataclass
class BranchingCertificate:
    touch_point: np.ndarray
    curve_a: np.ndarray
    curve_b: np.ndarray
    separation: float
    max_tangency_error: float

    def as_dict(self):
        return {
            "touch_point": self.touch_point.tolist(),
            "separation": self.separation,
            "max_tangency_error": self.max_tangency_error,
            "n_vertices_a": len(self.curve_a),
            "n_vertices_b": len(self.curve_b),
        }


def _psi(psi):
    psi = psi if psi is not None else MobiusCircleMap(0.6)
    if not 0.0 < psi.lam < 0.5:
        raise InvalidParameterError(
            f"series need Psi'(0) < 1/2 < 2 < Psi'(1/2); multiplier {psi.lam} is out of range"
        )
    return psi


def _circle_gap(y, centre):
    r = np.mod(np.asarray(y, dtype=float) - centre, 1.0)
    return np.minimum(r, 1.0 - r)


def _terms(C, S, log_mu):
    """``cos^2(pi Psi^k y)`` and its y-derivative for multiplier ``exp(log_mu)``."""
    C = C[..., None]
    S = S[..., None]
    mu = np.exp(-np.abs(log_mu))  # always <= 1
    CC, SS, CS = C * C, S * S, C * S
    small = log_mu <= 0  # multiplier mu itself; otherwise 1/mu
    with np.errstate(invalid="ignore", divide="ignore"):
        d_small = CC + mu * mu * SS
        d_big = mu * mu * CC + SS
        val = np.where(small, CC / d_small, mu * mu * CC / d_big)
        der = np.where(small, -2 * np.pi * mu * mu * CS / d_small**2, -2 * np.pi * mu * mu * CS / d_big**2)
    return val, der


def _check_depth(depth):
    depth = int(depth)
    if depth < 1:
        raise InsufficientDepthError("truncation depth must be at least 1")
    return depth


def beta_series(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    psi = _psi(psi)
    depth = _check_depth(depth)
    y = np.asarray(y, dtype=float)
    if np.any(_circle_gap(y, 0.0) <= delta):
        raise SingularInputError(f"beta is singular on y = 0; inputs must stay {delta} away")
    C, S = half_angle_pair(y)
    k = np.arange(1, depth + 1)
    val, _ = _terms(C, S, -k * np.log(psi.lam))
    value = (2.0 ** k * val).sum(axis=-1)
    r = 2.0 * psi.lam**2
    with np.errstate(divide="ignore"):
        tail = (C / S) ** 2 * r ** (depth + 1) / (1.0 - r)
    if not np.all(np.isfinite(tail)):
        raise InsufficientDepthError("beta tail bound is not finite at this depth")
    return SeriesTruncation(value, tail, depth)


def beta_prime_series(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    psi = _psi(psi)
    depth = _check_depth(depth)
    y = np.asarray(y, dtype=float)
    if np.any(_circle_gap(y, 0.0) <= delta):
        raise SingularInputError(f"beta' is singular on y = 0; inputs must stay {delta} away")
    C, S = half_angle_pair(y)
    k = np.arange(1, depth + 1)
    _, der = _terms(C, S, -k * np.log(psi.lam))
    value = (2.0 ** k * der).sum(axis=-1)
    r = 2.0 * psi.lam**2
    with np.errstate(divide="ignore"):
        tail = 2 * np.pi * np.abs(C) / np.abs(S) ** 3 * r ** (depth + 1) / (1.0 - r)
    if not np.all(np.isfinite(tail)):
        raise InsufficientDepthError("beta' tail bound is not finite at this depth")
    return SeriesTruncation(value, tail, depth)


def gamma_series(y, depth=DEFAULT_DEPTH, psi=None):
    psi = _psi(psi)
    depth = _check_depth(depth)
    y = np.asarray(y, dtype=float)
    C, S = half_angle_pair(y)
    k = np.arange(depth)
    val, _ = _terms(C, S, k * np.log(psi.lam))
    value = -(2.0 ** -k * val).sum(axis=-1)
    return SeriesTruncation(value, np.full(y.shape, 4.0 * 2.0**-depth), depth)


def gamma_prime_series(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    psi = _psi(psi)
    depth = _check_depth(depth)
    y = np.asarray(y, dtype=float)
    if np.any(_circle_gap(y, 0.5) <= delta):
        raise SingularInputError(f"gamma' is singular on y = 1/2; inputs must stay {delta} away")
    C, S = half_angle_pair(y)
    k = np.arange(depth)
    _, der = _terms(C, S, k * np.log(psi.lam))
    value = -(2.0 ** -k * der).sum(axis=-1)
    q = 0.5 * psi.lam
    tail = np.pi / (C * C) * q**depth / (1.0 - q)
    return SeriesTruncation(value, tail, depth)


def beta(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    return beta_series(y, depth, psi, delta).value


def gamma(y, depth=DEFAULT_DEPTH, psi=None):
    return gamma_series(y, depth, psi).value


def beta_prime(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    return beta_prime_series(y, depth, psi, delta).value


def gamma_prime(y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    return gamma_prime_series(y, depth, psi, delta).value


def cohomology_residual(which, y, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    """Residual of ``u(Psi y) - 2 u(y) - (cos 2 pi y + 1)`` and its error budget.

    The budget is ``tail(Psi y) + 2 tail(y)``, which bounds the residual of the
    truncated sums whenever the full series satisfies the equation.
    """
    psi = _psi(psi)
    y = np.asarray(y, dtype=float)
    py = psi.apply(y)
    if which == "gamma":
        a, b = gamma_series(py, depth, psi), gamma_series(y, depth, psi)
    elif which == "beta":
        b = beta_series(y, depth, psi, delta)
        a = beta_series(py, depth, psi, delta=0.0)
    else:
        raise ValueError(f"unknown series {which!r}")
    rhs = np.cos(TWO_PI * y) + 1.0
    resid = np.abs(a.value - 2.0 * b.value - rhs)
    return resid, a.tail_bound + 2.0 * b.tail_bound


def center_direction(p, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    """Angle of E^c at torus points ``p`` and a flag marking snapped points.

    Within ``delta`` of the circle y = 1/2 the direction is the limiting
    horizontal one.
    """
    y = np.asarray(p, dtype=float)[..., 1]
    flag = _circle_gap(y, 0.5) <= delta
    ang = np.zeros(y.shape)
    if np.any(~flag):
        gp = gamma_prime(y[~flag], depth, psi, delta)
        ang[~flag] = geo.direction_angle(np.stack([gp, np.ones_like(gp)], axis=-1))
    return ang, flag


def unstable_direction(p, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    y = np.asarray(p, dtype=float)[..., 1]
    flag = _circle_gap(y, 0.0) <= delta
    ang = np.zeros(y.shape)
    if np.any(~flag):
        bp = beta_prime(y[~flag], depth, psi, delta)
        ang[~flag] = geo.direction_angle(np.stack([bp, np.ones_like(bp)], axis=-1))
    return ang, flag


def bundle_samples(points, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    eu, _ = unstable_direction(pts, depth, psi, delta)
    ec, _ = center_direction(pts, depth, psi, delta)
    return [BundleSample(p, float(u), float(c)) for p, u, c in zip(pts, eu, ec)]


def transversality_margin(grid_n=512, depth=DEFAULT_DEPTH, psi=None, delta=DEFAULT_DELTA):
    """Smallest projective angle between E^u and E^c over a torus grid."""
    pts = torus_grid(grid_n)
    eu, _ = unstable_direction(pts, depth, psi, delta)
    ec, _ = center_direction(pts, depth, psi, delta)
    return float(np.min(geo.projective_distance(eu, ec)))


def _on_circle(y, centre):
    return _circle_gap(y, centre) == 0.0


def splitting_invariance_residual(p, depth=DEFAULT_DEPTH, model=None, delta=DEFAULT_DELTA):
    """Projective distance between ``Df_p E(p)`` and ``E(f p)``, max over E^c, E^u.

    Points exactly on an invariant circle use the bundle's defining case;
    points merely close to one are rejected.
    """
    model = model if model is not None else IncoherentModel()
    psi = model.psi
    p = np.atleast_2d(np.asarray(p, dtype=float))
    fp = model.apply_torus(p)
    for pts in (p, fp):
        y = pts[..., 1]
        near_c = (_circle_gap(y, 0.5) <= delta) & ~_on_circle(y, 0.5)
        near_u = (_circle_gap(y, 0.0) <= delta) & ~_on_circle(y, 0.0)
        if np.any(near_c | near_u):
            raise SingularInputError("point or its image lies near a singular circle")
    J = model.jacobian(p)
    worst = np.zeros(len(p))
    for fn in (center_direction, unstable_direction):
        a, _ = fn(p, depth, psi, delta)
        b, _ = fn(fp, depth, psi, delta)
        img = np.einsum("nij,nj->ni", J, geo.direction_vector(a))
        worst = np.maximum(worst, geo.projective_distance(geo.direction_angle(img), b))
    return worst


def _stretch(J, angle):
    v = np.einsum("nij,nj->ni", J, geo.direction_vector(angle))
    return np.hypot(v[:, 0], v[:, 1])


def ph_inequality_report(model=None, depth=DEFAULT_DEPTH, grid_n=512, delta=DEFAULT_DELTA):
    """Unit-vector stretches of Df along E^u and E^c.

    Reports the values on the invariant circles y = 0 and y = 1/2 (the
    non-wandering set) and the extremes over a ``grid_n x grid_n`` grid.
    """
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be at least 2")
    model = model if model is not None else IncoherentModel()
    psi = model.psi

    def measure(pts):
        J = model.jacobian(pts)
        su = _stretch(J, unstable_direction(pts, depth, psi, delta)[0])
        sc = _stretch(J, center_direction(pts, depth, psi, delta)[0])
        return su, sc

    circles = {}
    xs = np.arange(16) / 16.0
    for name, yc in (("y=0", 0.0), ("y=1/2", 0.5)):
        su, sc = measure(np.stack([xs, np.full_like(xs, yc)], axis=-1))
        circles[name] = {
            "unstable_stretch": float(su.min()),
            "center_stretch": float(sc.max()),
            "ratio": float((sc / su).max()),
        }
    su, sc = measure(torus_grid(grid_n))
    ratio = sc / su
    circles_ok = all(c["unstable_stretch"] > 1 and c["ratio"] < 1 for c in circles.values())
    return {
        "circles": circles,
        "min_unstable_stretch": float(su.min()),
        "max_ratio": float(ratio.max()),
        "grid_n": grid_n,
        "passed_circles": bool(circles_ok),
        "passed_grid": bool(su.min() > 1 and ratio.max() < 1),
    }


def sigma_curve(p, samples=201, depth=DEFAULT_DEPTH, psi=None, t_range=(0.0, 1.0), ts=None):
    """Centre integral curve ``y -> (x0 + gamma(y) - gamma(y0), y)`` through ``p``.

    ``t`` is the height above ``p``; the curve passes through ``p`` at t = 0.
    Vertices live on the cover (no wrapping).
    """
    if ts is None:
        if samples < 2:
            raise InvalidParameterError("need at least two samples")
        ts = np.linspace(t_range[0], t_range[1], samples)
    p = np.asarray(p, dtype=float)
    ys = p[1] + np.asarray(ts, dtype=float)
    g0 = gamma(p[1], depth, psi)
    return np.stack([p[0] + gamma(ys, depth, psi) - g0, ys], axis=-1)


def polyline_tangents(curve):
    """Projective angle of the central secant at each interior vertex."""
    d = curve[2:] - curve[:-2]
    return geo.direction_angle(d)


def branching_certificate(model=None, depth=DEFAULT_DEPTH, window=0.25, samples=4001,
                          delta=DEFAULT_DELTA, tangency_tol=1e-4, x0=0.0):
    """Two distinct E^c integral curves through ``(x0, 1/2)``.

    ``curve_a`` is the invariant circle, ``curve_b`` the sigma-curve that
    touches it from both sides.  Raises if the sampled tangency cannot be
    certified at the requested depth.
    """
    model = model if model is not None else IncoherentModel()
    psi = model.psi
    touch = np.array([x0, 0.5])
    xa = np.linspace(x0 - window, x0 + window, samples)
    curve_a = np.stack([xa, np.full_like(xa, 0.5)], axis=-1)
    curve_b = sigma_curve(touch, depth=depth, psi=psi, ts=np.linspace(-window, window, samples))

    errs = []
    for curve in (curve_a, curve_b):
        inner = curve[1:-1]
        ok = _circle_gap(inner[:, 1], 0.5) > delta
        if curve is curve_a:
            ok = np.ones(len(inner), dtype=bool)
        tang = polyline_tangents(curve)
        ec, _ = center_direction(inner, depth, psi, delta)
        errs.append(float(np.max(geo.projective_distance(tang[ok], ec[ok]), initial=0.0)))
    max_err = max(errs)
    separation = float(np.max(np.abs(curve_b[:, 1] - 0.5)))
    through = np.min(np.hypot(*(curve_b - touch).T)) < 1e-12
    if max_err > tangency_tol or separation <= 0.1 or not through:
        raise CertificateError(
            f"branching certificate failed: tangency error {max_err:.2e}, separation {separation:.3f}"
        )
    return BranchingCertificate(touch, curve_a, curve_b, separation, max_err)


def integrate_center_curve(starts, depth=DEFAULT_DEPTH, psi=None, step=1e-3, n_steps=100,
                           delta=DEFAULT_DELTA):
    """Fixed-step RK4 along the unit E^c field, oriented upward.

    Trajectories that come within ``2 * delta`` of y = 1/2 stop there.
    """
    def field(y):
        gp = gamma_prime(y, depth, psi, delta)
        n = np.sqrt(1.0 + gp * gp)
        return np.stack([gp / n, 1.0 / n], axis=-1)

    pts = np.array(starts, dtype=float, copy=True)
    active = np.ones(len(pts), dtype=bool)
    for _ in range(n_steps):
        # stop before any RK stage can enter the excluded band
        active &= _circle_gap(pts[:, 1], 0.5) > 2 * delta
        if not np.any(active):
            break
        y = pts[active, 1]
        k1 = field(y)
        k2 = field(y + 0.5 * step * k1[:, 1])
        k3 = field(y + 0.5 * step * k2[:, 1])
        k4 = field(y + step * k3[:, 1])
        pts[active] += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return pts


def uniqueness_check(n_points=1000, depth=DEFAULT_DEPTH, psi=None, seed=0, step=1e-3, n_steps=100,
                     delta=DEFAULT_DELTA):
    """Max gap between ODE-continued centre curves and closed-form sigma-curves."""
    rng = np.random.default_rng(seed)
    pts = rng.random((n_points, 2))
    keep = _circle_gap(pts[:, 1], 0.5) > 2 * delta
    pts = pts[keep]
    ends = integrate_center_curve(pts, depth, psi, step, n_steps, delta)
    g = gamma(ends[:, 1], depth, psi) - gamma(pts[:, 1], depth, psi)
    err = np.abs(ends[:, 0] - (pts[:, 0] + g))
    return {"n_points": int(len(pts)), "max_error": float(err.max()),
            "mean_arclength": float(np.mean(np.abs(ends[:, 1] - pts[:, 1])))}
