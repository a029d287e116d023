import numpy as np
import pytest
from hypothesis import given, strategies as st

from phendo import geometry as geo
from phendo import incoherent as inc
from phendo.errors import CertificateError, InsufficientDepthError, SingularInputError
from phendo.models import IncoherentModel

off_circles = st.floats(0.03, 0.47) | st.floats(0.53, 0.97)


# --- series values ---------------------------------------------------------

@pytest.mark.parametrize("K", [1, 5, 20, 40])
def test_series_vanish_at_half(K):
    assert inc.beta(0.5, K) == 0.0
    assert inc.gamma(0.5, K) == 0.0


@pytest.mark.parametrize("K", [5, 20, 40])
def test_gamma_at_zero_is_minus_two(K):
    g = inc.gamma_series(0.0, K)
    assert abs(g.value + 2.0) <= 4 * 2.0 ** -K
    assert g.tail_bound == pytest.approx(4 * 2.0 ** -K)


@pytest.mark.parametrize("y", [0.1, 0.2, 0.3, 0.4])
def test_beta_solves_cohomological_equation(y):
    r, b = inc.cohomology_residual("beta", y)
    assert r <= b + 1e-9


@pytest.mark.parametrize("K", [20, 40])
def test_cohomological_equation_on_many_points(K, rng):
    y = rng.random(10_000)
    r, b = inc.cohomology_residual("gamma", y, K)
    assert np.all(r <= b + 1e-9)
    y = rng.uniform(0.02, 0.98, 10_000)
    r, b = inc.cohomology_residual("beta", y, K)
    assert np.all(r <= b + 1e-9)


def test_beta_depth_doubling_within_tail():
    a, b = inc.beta_series(0.3, 20), inc.beta_series(0.3, 40)
    assert abs(a.value - b.value) <= a.tail_bound + 1e-15


def test_beta_rejects_points_near_zero():
    with pytest.raises(SingularInputError):
        inc.beta(0.01)


def test_nonpositive_depth_rejected():
    with pytest.raises(InsufficientDepthError):
        inc.gamma(0.3, 0)


# --- derivatives -----------------------------------------------------------

@pytest.mark.parametrize("y", [0.1, 0.25, 0.4, 0.6, 0.8])
def test_derivatives_match_finite_differences(y):
    h = 1e-6
    fd = (inc.gamma(y + h) - inc.gamma(y - h)) / (2 * h)
    assert inc.gamma_prime(y) == pytest.approx(fd, abs=1e-5)
    fd = (inc.beta(y + h) - inc.beta(y - h)) / (2 * h)
    assert inc.beta_prime(y) == pytest.approx(fd, abs=1e-5)


def test_derivative_signs_on_half_circles():
    # gamma(0) = -2 < 0 = gamma(1/2) forces gamma to increase on (0, 1/2)
    assert inc.gamma_series(0.0).value < inc.gamma(0.5)
    lo = np.linspace(0.03, 0.47, 200)
    hi = 1.0 - lo
    assert np.all(inc.beta_prime(lo) < 0) and np.all(inc.gamma_prime(lo) > 0)
    assert np.all(inc.beta_prime(hi) > 0) and np.all(inc.gamma_prime(hi) < 0)


def test_gamma_prime_blows_up_at_half():
    vals = [abs(inc.gamma_prime(0.5 - 10.0 ** -j, delta=0.0)) for j in range(1, 7)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_beta_prime_blows_up_at_zero():
    vals = [abs(inc.beta_prime(10.0 ** -j, delta=0.0)) for j in range(1, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# --- bundles ---------------------------------------------------------------

def test_bundles_on_the_circles():
    xs = np.linspace(0, 1, 9)
    ang, flag = inc.center_direction(np.stack([xs, np.full_like(xs, 0.5)], axis=-1))
    assert np.all(geo.projective_distance(ang, 0.0) == 0) and np.all(flag)
    ang, _ = inc.unstable_direction(np.stack([xs, np.zeros_like(xs)], axis=-1))
    assert np.all(geo.projective_distance(ang, 0.0) == 0)


@pytest.mark.parametrize("d", [1e-4, -1e-4])
def test_center_direction_nearly_horizontal_next_to_half(d):
    ang, _ = inc.center_direction(np.array([0.2, 0.5 + d]))
    assert geo.projective_distance(ang, 0.0) <= 0.05


def test_transversality_margin_positive():
    assert inc.transversality_margin(128) >= 1e-3


@given(st.floats(0, 1, exclude_max=True), off_circles)
def test_bundles_transverse(x, y):
    p = np.array([x, y])
    assert geo.projective_distance(inc.center_direction(p)[0], inc.unstable_direction(p)[0]) >= 1e-3


def test_splitting_invariance_random_points(rng):
    m = IncoherentModel()
    pts = rng.random((400, 2))
    ok = np.ones(len(pts), bool)
    for q in (pts, m.apply_torus(pts)):
        ok &= (np.abs(q[:, 1] - 0.5) > 0.04) & (np.minimum(q[:, 1], 1 - q[:, 1]) > 0.04)
    assert np.max(inc.splitting_invariance_residual(pts[ok])) <= 1e-6


def test_splitting_exact_on_half_circle():
    assert inc.splitting_invariance_residual(np.array([[0.3, 0.5]]))[0] <= 1e-15


def test_shallow_depth_inflates_invariance_residual():
    p = np.array([[0.3, 0.3]])
    assert inc.splitting_invariance_residual(p, depth=5) > inc.splitting_invariance_residual(p, depth=40)


def test_partial_hyperbolicity_anchors():
    rep = inc.ph_inequality_report(grid_n=64)
    c0, c1 = rep["circles"]["y=0"], rep["circles"]["y=1/2"]
    assert (c0["unstable_stretch"], c0["ratio"]) == pytest.approx((2.0, 0.125), abs=1e-6)
    assert (c1["unstable_stretch"], c1["ratio"]) == pytest.approx((4.0, 0.5), abs=1e-6)
    assert rep["passed_circles"] and rep["passed_grid"]


# --- curves ----------------------------------------------------------------

@given(st.floats(0, 1), off_circles)
def test_sigma_curve_passes_through_its_base(x, y):
    p = np.array([x, y])
    c = inc.sigma_curve(p, ts=np.array([0.0, 0.1]))
    assert np.allclose(c[0], p, atol=1e-15)


def test_sigma_tangent_follows_gamma_prime():
    p = np.array([0.1, 0.0])
    c = inc.sigma_curve(p, ts=np.array([0.25 - 1e-6, 0.25, 0.25 + 1e-6]))
    tang = inc.polyline_tangents(c)[0]
    assert geo.projective_distance(tang, geo.direction_angle([inc.gamma_prime(0.25), 1.0])) < 1e-6


def test_sigma_translates_are_disjoint_off_half():
    ts = np.linspace(0, 0.45, 200)
    a = inc.sigma_curve(np.array([0.0, 0.0]), ts=ts)
    b = inc.sigma_curve(np.array([0.25, 0.0]), ts=ts)
    assert np.allclose(b[:, 0] - a[:, 0], 0.25) and np.allclose(a[:, 1], b[:, 1])


def test_branching_certificate():
    cert = inc.branching_certificate()
    assert cert.separation > 0.1
    assert cert.max_tangency_error <= 1e-4
    assert np.allclose(cert.curve_a[:, 1], 0.5)
    below = cert.curve_b[:, 1] < 0.5 - 0.02
    above = cert.curve_b[:, 1] > 0.5 + 0.02
    assert np.all(inc.gamma_prime(cert.curve_b[below, 1]) > 0)
    assert np.all(inc.gamma_prime(cert.curve_b[above, 1]) < 0)


def test_branching_certificate_fails_when_window_too_small():
    with pytest.raises(CertificateError):
        inc.branching_certificate(window=0.05, samples=201)


def test_uniqueness_off_the_circle():
    rep = inc.uniqueness_check(200)
    assert rep["max_error"] <= 1e-4 and rep["n_points"] > 100
