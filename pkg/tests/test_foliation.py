import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phendo import foliation as fol
from phendo import geometry as geo
from phendo import incoherent as inc
from phendo.errors import ConvergenceError, DegenerateLeafError, SeedSelectionError
from phendo.foliation import LeafPolyline, SeedLine
from phendo.models import IncoherentModel, PerturbedLinearModel


@pytest.fixture(scope="module")
def seed(perturbed):
    return fol.seed_foliation(perturbed)


# --- seeds -----------------------------------------------------------------

@pytest.mark.parametrize("eps", [0.0, 0.05])
def test_seed_slope_is_one_minus_one(eps):
    assert tuple(fol.seed_foliation(PerturbedLinearModel([[3, 1], [1, 1]], eps)).slope) == (1, -1)


def test_unstable_direction_rejected_as_seed(linear):
    with pytest.raises(SeedSelectionError):
        fol.check_seed_direction(linear, linear.linearisation().v_u)


# --- backward leaves -------------------------------------------------------

def test_depth_zero_is_the_seed_segment(perturbed, seed):
    p = np.array([0.3, 0.7])
    leaf = fol.backward_leaf(perturbed, p, 0, 0.5, seed)
    off = (leaf.vertices - p) @ np.array([-seed.direction[1], seed.direction[0]])
    assert np.max(np.abs(off)) <= 1e-12
    assert np.ptp(leaf.arclength) == pytest.approx(1.0, abs=1e-2)


def test_linear_leaf_direction_contracts_onto_stable_line(linear, seed):
    lin = linear.linearisation()
    v_s = geo.direction_angle(lin.v_s)
    leaf = fol.backward_leaf(linear, np.array([0.2, 0.1]), 10, 0.5, seed)
    d = geo.direction_angle(leaf.vertices[-1] - leaf.vertices[0])
    initial = geo.projective_distance(seed.angle, v_s)
    # symmetric A: A^{-n} scales the tangent of the angle to v_s by (lambda_s / lambda_u)^n
    ratio = np.tan(geo.projective_distance(d, v_s)) / np.tan(initial)
    assert ratio == pytest.approx(abs(lin.lambda_s / lin.lambda_u) ** 10, rel=1e-4)


def test_leaf_tangents_match_iterated_centre_field(perturbed, seed):
    leaf = fol.backward_leaf(perturbed, np.array([0.4, 0.6]), 10, 0.5, seed)
    tang = geo.direction_angle(leaf.vertices[2:] - leaf.vertices[:-2])
    ref = fol.direction_by_iteration(perturbed, leaf.vertices[1:-1], "center", 30)
    assert np.max(geo.projective_distance(tang, ref)) <= 1e-3


def test_leaf_is_valid_polyline(perturbed, seed):
    leaf = fol.backward_leaf(perturbed, np.array([0.1, 0.9]), 8, 1.0, seed)
    assert leaf.validate()
    edges = np.diff(leaf.arclength)
    assert edges.max() <= fol.H_MAX + 1e-12


def test_repeated_vertex_is_degenerate():
    with pytest.raises(DegenerateLeafError):
        LeafPolyline(np.array([[0, 0], [0, 0], [1, 1.0]])).validate()


# --- centre leaves ---------------------------------------------------------

def test_linear_centre_leaf_is_the_stable_line(linear):
    lin = linear.linearisation()
    p = np.array([0.3, 0.3])
    leaf = fol.center_leaf(linear, p, 1.0, 1e-12)
    normal = np.array([-lin.v_s[1], lin.v_s[0]])
    assert np.max(np.abs((leaf.vertices - p) @ normal)) <= 1e-12


def test_convergence_failure_carries_gap(perturbed, seed):
    with pytest.raises(ConvergenceError) as err:
        fol.center_leaf(perturbed, np.array([0.2, 0.2]), 1.0, 1e-4, seed, n_max=2)
    assert err.value.gap > 1e-4


def test_no_crossings_between_centre_leaves(perturbed, seed, rng):
    leaves = fol.center_leaves(perturbed, rng.random((40, 2)), 1.0, 1e-4, seed)
    assert fol.no_crossing_check(leaves, perturbed, seed)["passed"]


def test_refinement_resolves_interleaved_chords(perturbed, seed):
    # two points almost on one centre leaf: at the default resolution their
    # leaves are closer than the chord sag and the polylines interleave
    P = np.array([[0.86702487, 0.05183565], [0.61021236, 0.69764252]])
    a, b = (fol.backward_leaf(perturbed, p, 6, 1.0, seed) for p in P)
    assert not fol.no_crossing_check([a, b])["passed"]
    rep = fol.no_crossing_check([a, b], perturbed, seed)
    assert rep["refined_pairs"][0]["crossings"] == 0
    assert rep["passed"]


def test_crossing_detected_for_transverse_segments():
    a = LeafPolyline(np.array([[0, 0], [1, 1.0]]))
    b = LeafPolyline(np.array([[0, 1], [1, 0.0]]))
    rep = fol.no_crossing_check([a, b])
    assert not rep["passed"] and rep["offending_pairs"] == [[0, 1]]


def test_centre_leaves_invariant(perturbed, seed):
    leaf = fol.center_leaf(perturbed, np.array([0.35, 0.55]), 1.0, 1e-4, seed)
    assert fol.invariance_gap(perturbed, leaf, 1.0, 1e-4, seed) <= 2e-4


@settings(max_examples=10)
@given(st.integers(-2, 2), st.integers(-2, 2))
def test_centre_leaves_are_deck_invariant(a, b):
    model = PerturbedLinearModel([[3, 1], [1, 1]], 0.05)
    p, v = np.array([0.25, 0.65]), np.array([a, b], dtype=float)
    one = fol.backward_leaf(model, p, 6, 0.5)
    two = fol.backward_leaf(model, p + v, 6, 0.5)
    assert fol.leaf_sup_distance(one.translated(v), two) <= 2e-4


def test_tangent_convergence_rate(perturbed, seed):
    rep = fol.tangent_convergence(perturbed, np.array([0.3, 0.8]), seed=seed)
    assert rep["mean_ratio"] < 0.9


# --- unstable leaves and directions ----------------------------------------

def test_linear_unstable_direction_is_eigenvector(linear, rng):
    ang = fol.direction_by_iteration(linear, rng.random((10, 2)), "unstable", 20)
    assert np.max(geo.projective_distance(ang, geo.direction_angle(linear.linearisation().v_u))) <= 1e-12


def test_incoherent_centre_by_iteration_matches_series(rng):
    m = IncoherentModel()
    pts = rng.random((400, 2))
    for q in (pts,):
        pts = pts[(np.abs(q[:, 1] - 0.5) > 0.05) & (np.minimum(q[:, 1], 1 - q[:, 1]) > 0.05)][:100]
    it = fol.direction_by_iteration(m, pts, "center", 20)
    ser, _ = inc.center_direction(pts)
    assert np.max(geo.projective_distance(it, ser)) <= 1e-4


def test_unstable_field_is_invariant(perturbed, rng):
    p = rng.random((50, 2))
    a = fol.direction_by_iteration(perturbed, p, "unstable", 20)
    img = np.einsum("nij,nj->ni", perturbed.jacobian(p), geo.direction_vector(a))
    b = fol.direction_by_iteration(perturbed, perturbed.lift_apply(p), "unstable", 20)
    assert np.max(geo.projective_distance(geo.direction_angle(img), b)) <= 1e-5


# --- product structure -----------------------------------------------------

def test_linear_product_structure(linear):
    lin = linear.linearisation()
    base = np.array([0.1, 0.2])
    C = np.array([base + i * 0.05 * lin.v_u + 0.475 * lin.v_s for i in range(20)])
    U = np.array([base + 0.475 * lin.v_u + j * 0.05 * lin.v_s for j in range(20)])
    cl = [LeafPolyline(np.array([c - 0.8 * lin.v_s, c + 0.8 * lin.v_s]), 0) for c in C]
    ul = [LeafPolyline(np.array([u - 0.8 * lin.v_u, u + 0.8 * lin.v_u]), 0) for u in U]
    rep = fol.product_structure_check(cl, ul)
    assert rep["passed"] and rep["min_count"] == rep["max_count"] == 1


def test_parallel_families_fail_product_structure():
    a = [LeafPolyline(np.array([[0, y], [1, y]])) for y in (0.0, 0.5)]
    b = [LeafPolyline(np.array([[0, y], [1, y]])) for y in (0.25, 0.75)]
    rep = fol.product_structure_check(a, b)
    assert not rep["passed"] and rep["max_count"] == 0


def test_crossing_counts_agree_with_shapely(rng):
    shapely = pytest.importorskip("shapely.geometry")
    leaves = [LeafPolyline(np.cumsum(rng.normal(0, 0.1, (30, 2)), axis=0) + rng.random(2)) for _ in range(6)]
    counts = fol.crossing_counts(leaves)
    for i in range(6):
        for j in range(i + 1, 6):
            inter = shapely.LineString(leaves[i].vertices).intersection(shapely.LineString(leaves[j].vertices))
            n = 0 if inter.is_empty else len(getattr(inter, "geoms", [inter]))
            assert counts[i, j] == n


# --- growth ------------------------------------------------------------------

@pytest.fixture(scope="module")
def families(perturbed, seed):
    rng = np.random.default_rng(7)
    pts = rng.random((6, 2))
    return (fol.center_leaves(perturbed, pts, 0.8, 1e-4, seed),
            fol.unstable_leaves(perturbed, pts[:2], 0.8))


def test_growth_constants(perturbed, families):
    cl, ul = families
    g10 = fol.growth_diagnostics(perturbed, cl, ul, n_max=10)
    g5 = fol.growth_diagnostics(perturbed, cl, ul, n_max=5)
    assert np.isfinite(g10.C_estimate) and g10.C_estimate == pytest.approx(g5.C_estimate, rel=0.1)
    assert g10.unstable_gap_monotone
    assert min(g10.C_estimate, g10.D_estimate, g10.K_estimate, g10.R_estimate) >= 0
    assert g10.R_estimate <= g10.R_bound


def test_linear_growth_is_trivial(linear):
    p = np.array([[0.2, 0.4], [0.6, 0.1]])
    cl = fol.center_leaves(linear, p, 0.8, 1e-4)
    ul = fol.unstable_leaves(linear, p[:1], 0.8)
    g = fol.growth_diagnostics(linear, cl, ul, n_max=10)
    assert g.C_estimate <= 1e-8 and g.R_estimate <= 1e-12


def test_leaf_rows(perturbed, seed):
    leaf = fol.backward_leaf(perturbed, np.array([0.5, 0.5]), 3, 0.2, seed)
    rows = fol.leaves_to_rows([leaf, leaf])
    assert len(rows) == 2 * len(leaf) and rows[0][:2] == (0, 0.0) and rows[-1][0] == 1
