import numpy as np
import pytest
from hypothesis import given, strategies as st

from phendo import geometry as geo
from phendo.errors import InvalidLinearisationError

SQRT2 = np.sqrt(2.0)
HYPERBOLIC_SET = [[[3, 1], [1, 1]], [[2, 1], [1, 1]], [[1, 1], [1, 0]], [[3, 2], [1, 1]], [[0, 1], [1, 3]]]
ints = st.integers(-5, 5)


def test_classify_diag_2_1():
    lin = geo.classify_linearisation([[2, 0], [0, 1]])
    assert lin.kind == geo.NON_HYPERBOLIC
    assert lin.lambda_u == pytest.approx(2.0) and lin.lambda_s == pytest.approx(1.0)


def test_classify_cat_like():
    lin = geo.classify_linearisation([[3, 1], [1, 1]])
    assert lin.kind == geo.HYPERBOLIC
    assert lin.lambda_u == pytest.approx(2 + SQRT2, abs=1e-12)
    assert lin.lambda_s == pytest.approx(2 - SQRT2, abs=1e-12)


def test_classify_expanding():
    lin = geo.classify_linearisation([[2, 0], [0, 3]])
    assert lin.kind == geo.EXPANDING
    assert (lin.lambda_s, lin.lambda_u) == pytest.approx((2.0, 3.0))


def test_identity_is_degenerate():
    assert geo.classify_linearisation(np.eye(2)).kind == geo.DEGENERATE


def test_zero_determinant_rejected():
    with pytest.raises(InvalidLinearisationError):
        geo.classify_linearisation([[1, 1], [1, 1]])


@pytest.mark.parametrize("m", HYPERBOLIC_SET)
def test_eigenpairs_and_projection_normalisation(m):
    lin = geo.classify_linearisation(m)
    A = np.array(m, dtype=float)
    assert lin.kind == geo.HYPERBOLIC
    for lam, v in ((lin.lambda_s, lin.v_s), (lin.lambda_u, lin.v_u)):
        assert np.allclose(A @ v, lam * v, atol=1e-12)
    pr = geo.projections(lin)
    assert abs(pr.s(lin.v_u)) < 1e-12 and abs(pr.u(lin.v_s)) < 1e-12
    assert pr.s(lin.v_s) == pytest.approx(1.0, abs=1e-12)
    assert pr.u(lin.v_u) == pytest.approx(1.0, abs=1e-12)


def test_pi_u_kills_stable_direction_of_cat_map():
    pr = geo.projections(geo.classify_linearisation([[3, 1], [1, 1]]))
    assert abs(pr.u(np.array([1.0, -1.0 - SQRT2]))) < 1e-12


@given(st.tuples(ints, ints, ints, ints))
def test_trichotomy_matches_eigenvalues(entries):
    A = np.array(entries, dtype=float).reshape(2, 2)
    if abs(np.linalg.det(A)) < 0.5:
        with pytest.raises(InvalidLinearisationError):
            geo.classify_linearisation(A)
        return
    lin = geo.classify_linearisation(A)
    ev = np.linalg.eigvals(A)
    if np.any(np.abs(ev.imag) > 1e-12):
        assert lin.kind == geo.DEGENERATE
        return
    s, u = sorted(np.abs(ev.real))
    if s < 1 - 1e-9 and u > 1 + 1e-9:
        assert lin.kind == geo.HYPERBOLIC
    elif s > 1 + 1e-9:
        assert lin.kind == geo.EXPANDING
    elif abs(s - 1) < 1e-9 and u > 1 + 1e-9:
        assert lin.kind == geo.NON_HYPERBOLIC
    else:
        assert lin.kind == geo.DEGENERATE


@given(st.floats(-0.7, 0.7), st.floats(-5, 5), st.floats(-5, 5))
def test_compose_inverts_projections(_, s, u):
    pr = geo.projections(geo.classify_linearisation([[3, 1], [1, 1]]))
    p = pr.compose(s, u)
    assert pr.s(p) == pytest.approx(s, abs=1e-12) and pr.u(p) == pytest.approx(u, abs=1e-12)


def test_cover_and_deck_helpers():
    assert np.allclose(geo.cover_to_torus([1.25, -0.5]), [0.25, 0.5])
    assert np.allclose(geo.deck_translate([0.1, 0.2], [1, -1]), [1.1, -0.8])
    assert geo.torus_distance([0.95, 0.0], [0.05, 0.0]) == pytest.approx(0.1)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_cover_to_torus_lands_in_unit_square(x, y):
    t = geo.cover_to_torus([x, y])
    assert np.all((0 <= t) & (t < 1)) and np.all(np.isfinite(t))


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_projective_distance_symmetric_and_bounded(a, b):
    d = geo.projective_distance(a, b)
    assert 0 <= d <= np.pi / 2 + 1e-12
    assert d == pytest.approx(geo.projective_distance(b, a), abs=1e-12)
    assert geo.projective_distance(a, a + np.pi) < 1e-9
