import numpy as np
import pytest
from hypothesis import given, strategies as st

from phendo import conjugacy as cj
from phendo import foliation as fol
from phendo.errors import ExtensionRequiredError, InsufficientWindowError
from phendo.foliation import LeafPolyline


def _arclength_leaves(model, approx, pts, window, tol):
    leaves = fol.center_leaves(model, pts, window, tol)
    return [cj.ArclengthLeaf(L, approx.projections, i) for i, L in enumerate(leaves)]


@pytest.fixture(scope="module")
def linear_leaves(linear, approx_linear):
    pts = np.random.default_rng(3).random((4, 2))
    return _arclength_leaves(linear, approx_linear, pts, 2.0, 1e-12)


@pytest.fixture(scope="module")
def perturbed_leaves(perturbed, approx):
    pts = np.random.default_rng(4).random((5, 2))
    return _arclength_leaves(perturbed, approx, pts, 2.5, 1e-5)


# --- T -----------------------------------------------------------------------

def test_linear_T_matches_closed_form(linear_leaves, approx_linear):
    pr, v_s = approx_linear.projections, approx_linear.lin.v_s
    exact = 1.0 / abs(pr.s(v_s / np.hypot(*v_s)))
    est = cj.estimate_T(linear_leaves)
    assert est.threshold == pytest.approx(exact, rel=0.02)
    assert est.T == pytest.approx(cj.T_SAFETY * est.threshold)


def test_T_stable_under_window_doubling(perturbed, approx):
    pts = np.random.default_rng(5).random((5, 2))
    a = cj.estimate_T(_arclength_leaves(perturbed, approx, pts, 2.5, 1e-5))
    b = cj.estimate_T(_arclength_leaves(perturbed, approx, pts, 5.0, 1e-5))
    assert abs(a.T - b.T) <= 0.05 * a.T


def test_single_short_leaf_cannot_certify_T(perturbed, approx):
    short = fol.backward_leaf(perturbed, np.array([0.2, 0.2]), 6, 0.3)
    with pytest.raises(InsufficientWindowError):
        cj.estimate_T([cj.ArclengthLeaf(short, approx.projections)])


# --- averaging ---------------------------------------------------------------

def test_orientation_follows_pi_s(perturbed_leaves):
    for L in perturbed_leaves:
        assert L.ps[-1] > L.ps[0]


def test_linear_h_is_half_T_translation(linear_leaves, approx_linear):
    T = cj.estimate_T(linear_leaves).T
    pr = approx_linear.projections
    for L in linear_leaves:
        p = L.leaf.base_point
        h = cj.average_along_leaf(approx_linear, L, p, T)
        d = L.leaf.vertices[-1] - L.leaf.vertices[0]
        d /= np.hypot(*d)
        assert np.allclose(h, p + 0.5 * T * d, atol=1e-9)
        assert abs(pr.u(h) - pr.u(p)) <= 1e-9


def test_quadrature_refinement(perturbed_leaves, approx):
    L = perturbed_leaves[0]
    T = 1.1
    s = L.locate(L.leaf.base_point)
    assert cj.leaf_average(L, s, T, T / 200) == pytest.approx(cj.leaf_average(L, s, T, T / 400), abs=1e-9)


def test_reversed_and_rebased_leaf_gives_same_image(perturbed_leaves, approx):
    L = perturbed_leaves[1]
    T = 1.1
    p = L.leaf.base_point
    h = cj.average_along_leaf(approx, L, p, T)
    v = L.leaf.vertices[7:][::-1]
    flipped = cj.ArclengthLeaf(LeafPolyline(v, len(v) - 1 - (L.leaf.base_index - 7)), approx.projections)
    assert flipped.s[0] == 0.0
    assert np.allclose(cj.average_along_leaf(approx, flipped, p, T), h, atol=1e-9)


def test_leaf_too_short_needs_extension(perturbed_leaves, approx):
    L = perturbed_leaves[0]
    with pytest.raises(ExtensionRequiredError):
        cj.average_along_leaf(approx, L, L.leaf.vertices[-5], 1.1)


@given(st.floats(0.0, 1.5), st.floats(1.0, 1.5))
def test_average_lies_between_window_endpoints(s0, T):
    leaf = LeafPolyline(np.array([[0.0, 0.0], [1.0, 0.5], [2.0, 0.2], [3.0, 1.0]]))

    class Proj:
        @staticmethod
        def s(p):
            return np.asarray(p)[..., 0]

    L = cj.ArclengthLeaf(leaf, Proj)
    if s0 + T > L.length:
        return
    avg = cj.leaf_average(L, s0, T)
    assert L.pi_s_alpha(s0) - 1e-12 <= avg <= L.pi_s_alpha(s0 + T) + 1e-12


# --- checks ------------------------------------------------------------------

def test_linear_checks_pass_exactly(linear_leaves, approx_linear):
    T = cj.estimate_T(linear_leaves).T
    samples = cj.conjugacy_samples(approx_linear, linear_leaves, T, 20)
    rep = cj.conjugacy_checks(approx_linear, linear_leaves, samples, 1e-9, 1e-9)
    assert rep["passed"], rep


def test_perturbed_checks_pass(perturbed_leaves, approx):
    T = cj.estimate_T(perturbed_leaves).T
    samples = cj.conjugacy_samples(approx, perturbed_leaves, T, 20)
    rep = cj.conjugacy_checks(approx, perturbed_leaves, samples)
    assert rep["passed"], rep
    assert rep["monotonicity"]["min_derivative"] >= 1 / T - 1e-6


def test_corrupted_sample_is_named(perturbed_leaves, approx):
    T = cj.estimate_T(perturbed_leaves).T
    samples = cj.conjugacy_samples(approx, perturbed_leaves, T, 20)
    samples[13].image = samples[13].image + 0.1
    rep = cj.conjugacy_checks(approx, perturbed_leaves, samples)
    assert not rep["leaf_to_leaf"]["passed"]
    assert rep["leaf_to_leaf"]["worst_sample"] == 13


def test_points_on_one_leaf_stay_unstably_close(perturbed, approx):
    # deep leaf: f^k of it is still a backward-iterated seed line for k <= 10
    leaf = fol.backward_leaf(perturbed, np.array([0.3, 0.4]), 25, 1.0)
    gd = fol.growth_diagnostics(perturbed, [fol.backward_leaf(perturbed, np.array([0.3, 0.4]), 6, 1.0)],
                                fol.unstable_leaves(perturbed, np.array([[0.3, 0.4]]), 0.5), n_max=10)
    p, q = leaf.vertices[0], leaf.vertices[-1]
    pr = approx.projections
    for _ in range(11):
        assert abs(pr.u(p) - pr.u(q)) <= gd.C_estimate + 1e-9
        p, q = perturbed.lift_apply(p), perturbed.lift_apply(q)
    # continuity shadow: jumps of H_s shrink when the sampling is refined
    hs = approx.H_s(leaf.vertices)
    assert np.max(np.abs(np.diff(hs))) < np.max(np.abs(np.diff(hs[::4])))


def test_sample_rows(perturbed_leaves, approx):
    samples = cj.conjugacy_samples(approx, perturbed_leaves[:1], 1.1, 5)
    rows = cj.samples_to_rows(samples)
    assert len(rows) == 5 and all(len(r) == 6 for r in rows)
