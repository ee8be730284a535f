import numpy as np
import pytest

from projconvex.convex import ConvexBody, random_interior_points
from projconvex.errors import LineMissesDomain, NotProperlyConvex, PointOutsideDomain
from projconvex.hilbert import HilbertSpaceCtx, foot_of_perpendicular, hilbert_distance, klein_distance
from projconvex.projcore import ProjLine, ProjPoint, normalize, random_projmap

from conftest import random_body


@pytest.fixture(scope="module")
def disk():
    return HilbertSpaceCtx.from_body(ConvexBody.klein_ball(2))


def h(*xy):
    return np.r_[1.0, xy]


def random_disk_point(rng, rmax=0.95):
    r = rmax * np.sqrt(rng.random())
    a = 2 * np.pi * rng.random()
    return np.array([r * np.cos(a), r * np.sin(a)])


def test_disk_closed_form(disk):
    assert hilbert_distance(disk, h(0, 0), h(0.5, 0)) == pytest.approx(np.log(3.0), abs=1e-12)
    assert hilbert_distance(disk, h(0, 0), h(0.5, 0)) == pytest.approx(2 * np.arctanh(0.5), abs=1e-12)


def test_zero_and_symmetry(disk):
    p, q = h(0.2, -0.1), h(-0.3, 0.4)
    assert hilbert_distance(disk, p, p) == 0.0
    assert hilbert_distance(disk, p, q) == pytest.approx(hilbert_distance(disk, q, p), abs=1e-12)
    assert hilbert_distance(disk, p, -3 * p) == 0.0


def test_twice_klein(disk):
    rng = np.random.default_rng(0)
    for _ in range(100):
        p, q = random_disk_point(rng), random_disk_point(rng)
        assert hilbert_distance(disk, h(*p), h(*q)) == pytest.approx(2 * klein_distance(p, q), abs=1e-9)


def test_outside_point(disk):
    with pytest.raises(PointOutsideDomain):
        hilbert_distance(disk, h(0, 0), h(1.5, 0))


def test_needs_properly_convex_body():
    with pytest.raises(NotProperlyConvex):
        HilbertSpaceCtx.from_body(ConvexBody.affine_patch(2))


def test_triangle_inequality_polytopes():
    rng = np.random.default_rng(1)
    for _ in range(5):
        body = random_body(2, rng)
        ctx = HilbertSpaceCtx.from_body(body)
        pts = random_interior_points(body, 60, rng)
        for a, b, c in pts.reshape(20, 3, 3):
            ab, bc, ac = hilbert_distance(ctx, a, b), hilbert_distance(ctx, b, c), hilbert_distance(ctx, a, c)
            assert ac <= ab + bc + 1e-9


def test_additivity_along_chords():
    rng = np.random.default_rng(2)
    body = random_body(3, rng)
    ctx = HilbertSpaceCtx.from_body(body)
    for a, b in random_interior_points(body, 40, rng).reshape(20, 2, 4):
        m = 0.3 * a + 0.7 * b
        assert hilbert_distance(ctx, a, b) == pytest.approx(
            hilbert_distance(ctx, a, m) + hilbert_distance(ctx, m, b), abs=1e-9)


def test_projective_invariance():
    rng = np.random.default_rng(3)
    body = random_body(2, rng, spread=0.4)
    ctx = HilbertSpaceCtx.from_body(body)
    for _ in range(5):
        g = random_projmap(2, rng, spread=0.2).matrix
        image = ConvexBody.from_vertices(body.vertices @ g.T)
        ctx_g = HilbertSpaceCtx.from_body(image)
        a, b = random_interior_points(body, 2, rng)
        assert hilbert_distance(ctx_g, g @ a, g @ b) == pytest.approx(hilbert_distance(ctx, a, b), abs=1e-9)


def test_foot_disk_symmetry(disk):
    line = ProjLine(normalize(h(0.5, 0)), normalize(h(0.5, 1)))
    foot = foot_of_perpendicular(disk, h(0, 0), line)
    assert foot.same_as(normalize(h(0.5, 0)), tol=1e-12)


def test_foot_on_line(disk):
    x = h(0.2, 0.3)
    line = ProjLine(normalize(x), normalize(h(-0.4, 0.1)))
    foot = foot_of_perpendicular(disk, x, line)
    assert foot.same_as(normalize(x), tol=1e-12)
    assert hilbert_distance(disk, foot.coords, x) < 1e-6


def test_foot_misses(disk):
    with pytest.raises(LineMissesDomain):
        foot_of_perpendicular(disk, h(0, 0), ProjLine(normalize(h(2, 0)), normalize(h(2, 1))))


def test_foot_beats_sampling_on_simplex():
    rng = np.random.default_rng(4)
    body = ConvexBody.simplex(2)
    ctx = HilbertSpaceCtx.from_body(body)
    for _ in range(3):
        x, a, b = random_interior_points(body, 3, rng)
        line = ProjLine(ProjPoint(a), ProjPoint(b))
        foot = foot_of_perpendicular(ctx, x, line)
        best = hilbert_distance(ctx, x, foot.coords)
        # chord points of the line inside the simplex
        ts = np.linspace(0, np.pi, 20000, endpoint=False)
        pts = np.cos(ts)[:, None] * line.basis[0] + np.sin(ts)[:, None] * line.basis[1]
        inside = [p for p in pts if body.contains(p, margin=1e-6)]
        idx = np.linspace(0, len(inside) - 1, 1000).astype(int)
        sampled = min(hilbert_distance(ctx, x, inside[i]) for i in idx)
        assert best <= sampled + 1e-8


def test_foot_set_is_interval():
    # on the line y0 = 2 y1 every point (2a, a, b) with a <= b <= 2a is at distance log 2 from the centroid
    body = ConvexBody.simplex(2)
    ctx = HilbertSpaceCtx.from_body(body)
    x = np.array([1.0, 1.0, 1.0])
    line = ProjLine(ProjPoint([2.0, 1.0, 0.2]), ProjPoint([2.0, 1.0, 5.0]))
    foot = foot_of_perpendicular(ctx, x, line)
    fmin = hilbert_distance(ctx, x, foot.coords)
    assert fmin == pytest.approx(np.log(2.0), abs=1e-9)
    ratio = foot.coords[2] / foot.coords[1]
    assert 1.0 - 1e-6 <= ratio <= 2.0 + 1e-6
    ts = np.linspace(0, np.pi, 4000, endpoint=False)
    pts = np.cos(ts)[:, None] * line.basis[0] + np.sin(ts)[:, None] * line.basis[1]
    near = [i for i, p in enumerate(pts) if body.contains(p, margin=1e-6)
            and hilbert_distance(ctx, x, p) <= fmin + 1e-8]
    assert len(near) > 10
    assert np.all(np.diff(near) == 1)
