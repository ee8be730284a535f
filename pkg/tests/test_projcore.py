import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projconvex.errors import DegeneratePoints, NotCollinear, OrientationMismatch, ZeroVector
from projconvex.projcore import (
    ProjLine,
    ProjMap,
    ProjPoint,
    apply,
    cross_ratio,
    lift_to_slpm,
    matrices_proportional,
    normalize,
    random_projmap,
)


def chart_points(ts, a=None, b=None):
    """Points of a projective line with affine chart values ts (a + t b)."""
    a = np.array([1.0, 0.2, -0.3]) if a is None else a
    b = np.array([0.1, 1.0, 0.5]) if b is None else b
    return [ProjPoint(a + t * b) for t in ts]


def test_normalize_examples():
    np.testing.assert_allclose(normalize([2, 0, 0]).coords, [1, 0, 0])
    np.testing.assert_allclose(normalize([0, -3, 0]).coords, [0, 1, 0])
    np.testing.assert_allclose(normalize([1, 1, 1, 1]).coords, [0.5] * 4)


def test_normalize_sphere_keeps_sign():
    np.testing.assert_allclose(normalize([0, -3, 0], "sphere").coords, [0, -1, 0])


def test_normalize_zero():
    with pytest.raises(ZeroVector):
        normalize([0.0, 0.0, 0.0])


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=5))
def test_normalize_idempotent(v):
    if np.linalg.norm(v) < 1e-6:
        return
    p = normalize(v)
    np.testing.assert_array_equal(normalize(p.coords).coords, p.coords)


def test_apply_examples():
    p = normalize([1, 1, 0])
    assert apply(ProjMap(np.eye(3)), p).same_as(p)
    g = ProjMap(np.diag([2.0, 1, 1]))
    assert apply(g, normalize([1, 0, 0])).same_as(normalize([1, 0, 0]))
    assert apply(g, p).same_as(normalize([2, 1, 0]))


def test_apply_is_action():
    rng = np.random.default_rng(1)
    for _ in range(100):
        g, h = random_projmap(3, rng), random_projmap(3, rng)
        p = normalize(rng.normal(size=4))
        assert apply(g @ h, p).same_as(apply(g, apply(h, p)))


def test_cross_ratio_hand_value():
    # chart values 0, 3, 1, 2 -> (1-0)(2-3) / ((2-0)(1-3)) = 1/4
    assert cross_ratio(*chart_points([0, 3, 1, 2])) == pytest.approx(0.25, abs=1e-12)


def test_cross_ratio_interval_calibration():
    for x in (-0.7, 0.3, 0.9):
        cr = cross_ratio(*chart_points([-1, 1, 0, x]))
        assert cr == pytest.approx((1 - x) / (1 + x), rel=1e-12)
        # (o, s, q, p) with o = -1, s = 1, q = x, p = 0 is the Hilbert integrand
        cr = cross_ratio(*chart_points([-1, 1, x, 0]))
        assert cr == pytest.approx((1 + x) / (1 - x), rel=1e-12)


def test_cross_ratio_chart_independent():
    rng = np.random.default_rng(2)
    ts = [0.3, -1.2, 2.0, 0.7]
    for _ in range(20):
        a, b = rng.normal(size=4), rng.normal(size=4)
        ref = (ts[2] - ts[0]) * (ts[3] - ts[1]) / ((ts[3] - ts[0]) * (ts[2] - ts[1]))
        assert cross_ratio(*chart_points(ts, a, b)) == pytest.approx(ref, rel=1e-10)


@settings(max_examples=200)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4, unique=True), st.integers(0, 2 ** 31))
def test_cross_ratio_invariance_and_swap(ts, seed):
    if min(abs(x - y) for i, x in enumerate(ts) for y in ts[i + 1:]) < 1e-3:
        return
    pts = chart_points(ts)
    g = random_projmap(2, np.random.default_rng(seed))
    cr = cross_ratio(*pts)
    assert cross_ratio(*(apply(g, p) for p in pts)) == pytest.approx(cr, rel=1e-9, abs=1e-9)
    assert cr * cross_ratio(pts[0], pts[1], pts[3], pts[2]) == pytest.approx(1.0, rel=1e-10)


def test_cross_ratio_errors():
    e = np.eye(3)
    with pytest.raises(NotCollinear):
        cross_ratio(*(ProjPoint(v) for v in (e[0], e[1], e[2], e[0] + e[1])))
    with pytest.raises(DegeneratePoints):
        cross_ratio(*chart_points([0, 1, 0, 2]))


def test_line_point_and_degeneracy():
    line = ProjLine(normalize([1, 0, 0]), normalize([1, 1, 0]))
    np.testing.assert_allclose(line.point(np.pi / 2), [0, 1, 0], atol=1e-15)
    with pytest.raises(DegeneratePoints):
        ProjLine(normalize([1, 0, 0]), normalize([-2, 0, 0]))


def test_lift_examples():
    assert np.allclose(lift_to_slpm(ProjMap(np.eye(3))).matrix, np.eye(3))
    m = lift_to_slpm(ProjMap(np.diag([4.0, 1, 1, 1]))).matrix
    assert np.linalg.det(m) == pytest.approx(1.0)
    np.testing.assert_allclose(m, np.diag([4.0, 1, 1, 1]) / 4 ** 0.25)
    m = lift_to_slpm(ProjMap(np.diag([-1.0, 1, 1])), orientation_reversing=True).matrix
    np.testing.assert_allclose(m, np.diag([-1.0, 1, 1]))


def test_lift_even_size_sign_mismatch():
    with pytest.raises(OrientationMismatch):
        lift_to_slpm(ProjMap(np.diag([-1.0, 1, 1, 1])))


def test_lift_projects_back():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        for _ in range(20):
            g = random_projmap(n, rng)
            flip = np.linalg.det(g.matrix) < 0
            m = lift_to_slpm(g, flip)
            assert m.mode == "sl_pm"
            assert np.linalg.det(m.matrix) == pytest.approx(-1.0 if flip else 1.0)
            assert matrices_proportional(m.matrix, g.matrix, 1e-10)
