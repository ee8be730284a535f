"""Properly convex bodies in RP^n and open convex cones in R^{n+1}.

A body is carried as a list of linear functionals (``x`` is inside iff
``H @ x > 0`` for its cone lift), optional quadric constraints
(``x @ Q @ x < 0``), a cloud of boundary samples given as cone lifts, and an
interior point.  Distances use the elliptic metric
``d(p, q) = arccos |<p, q>|`` on unit representatives.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize, nnls
from scipy.spatial import ConvexHull

from .errors import (
    DimensionMismatch,
    GeometryError,
    NotProperlyConvex,
    PointNotOnBoundary,
)

INTERIOR_MARGIN = 1e-9
LP_MARGIN = 1e-8
BOUNDARY_TOL = 1e-6


class Verdict(str, enum.Enum):
    PROPERLY_CONVEX = "ProperlyConvex"
    CONVEX_NOT_PROPER = "ConvexNotProper"
    NOT_CONVEX = "NotConvex"


def _unit_rows(x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    nrm = np.linalg.norm(x, axis=1, keepdims=True)
    # rows already of unit length are kept bit for bit
    nrm[np.abs(nrm - 1.0) <= 4 * np.finfo(float).eps] = 1.0
    return x / nrm


def elliptic_distance(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c = abs(p @ q) / (np.linalg.norm(p) * np.linalg.norm(q))
    return float(np.arccos(min(1.0, c)))


def max_margin_functional(vectors, equality=None):
    """Functional maximizing min_i phi(v_i) subject to ||phi||_inf <= 1.

    ``equality`` optionally lists vectors on which phi must vanish.
    Returns ``(phi, margin)`` where ``margin`` is measured on unit vectors.
    """
    v = _unit_rows(vectors)
    k, dim = v.shape
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-v, np.ones((k, 1))])
    a_eq = b_eq = None
    if equality is not None and len(equality):
        e = _unit_rows(equality)
        a_eq = np.hstack([e, np.zeros((len(e), 1))])
        b_eq = np.zeros(len(e))
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(-1, 1)] * dim + [(None, 1)], method="highs")
    if res.status != 0:
        raise GeometryError(f"chart LP failed: {res.message}")
    phi = res.x[:dim]
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        return phi, float(res.x[-1])
    return phi / nrm, float(np.min(v @ (phi / nrm)))


def chart_basis(ell):
    """Orthonormal basis (rows) of the hyperplane orthogonal to ``ell``."""
    ell = np.asarray(ell, dtype=float)
    q, _ = np.linalg.qr(np.column_stack([ell, np.eye(ell.size)]))
    return q[:, 1:ell.size].T


def to_chart(x, ell, basis):
    x = np.atleast_2d(x)
    return (x / (x @ ell)[:, None]) @ basis.T


def conic_facets(vectors):
    """Inward facet functionals of the closed cone spanned by ``vectors``.

    The cone must be pointed with nonempty interior.  Returns unit rows
    ``phi`` with ``phi @ v >= 0`` for every generator.
    """
    v = _unit_rows(vectors)
    dim = v.shape[1]
    if np.linalg.matrix_rank(v, tol=1e-10) < dim:
        raise NotProperlyConvex("cone has empty interior")
    ell, margin = max_margin_functional(v)
    if margin <= LP_MARGIN:
        raise NotProperlyConvex("cone contains a line")
    basis = chart_basis(ell)
    y = to_chart(v, ell, basis)
    if dim == 2:
        lo, hi = np.argmin(y[:, 0]), np.argmax(y[:, 0])
        phis = []
        for idx in (lo, hi):
            w = v[idx]
            phi = np.array([-w[1], w[0]])
            other = v[hi if idx == lo else lo]
            if phi @ other < 0:
                phi = -phi
            phis.append(phi)
        return _unit_rows(phis)
    hull = ConvexHull(y)
    eq = np.unique(np.round(hull.equations, 12), axis=0)
    a, b = eq[:, :-1], eq[:, -1]
    phis = -(a @ basis + b[:, None] * ell[None, :])
    return _unit_rows(phis)


def contains_line(generators) -> bool:
    """True when the closed conic hull of ``generators`` contains a full line.

    LP feasibility of 0 = sum w_i g_i with w >= 0 and sum w_i = 1.
    """
    g = _unit_rows(generators)
    k, dim = g.shape
    a_eq = np.vstack([g.T, np.ones((1, k))])
    b_eq = np.r_[np.zeros(dim), 1.0]
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return res.status == 0


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex domain of RP^n given by half-spaces and boundary samples."""

    dim: int
    halfspaces: np.ndarray
    samples: np.ndarray
    interior: np.ndarray
    quadrics: tuple = ()
    vertices: np.ndarray | None = None
    properly_convex: bool = True

    def __post_init__(self):
        n1 = self.dim + 1
        h = np.asarray(self.halfspaces, dtype=float).reshape(-1, n1)
        s = np.asarray(self.samples, dtype=float).reshape(-1, n1)
        x = np.asarray(self.interior, dtype=float).reshape(n1)
        object.__setattr__(self, "halfspaces", _unit_rows(h) if len(h) else h)
        object.__setattr__(self, "samples", _unit_rows(s))
        object.__setattr__(self, "interior", _unit_rows(x)[0])
        object.__setattr__(self, "quadrics", tuple(np.asarray(q, dtype=float) for q in self.quadrics))
        if self.vertices is not None:
            object.__setattr__(self, "vertices", _unit_rows(self.vertices))
        if self.margin(self.interior) <= INTERIOR_MARGIN:
            raise GeometryError("interior point does not strictly satisfy the constraints")

    # membership -----------------------------------------------------------
    def margin(self, x) -> float:
        """Smallest constraint value at the unit vector ``x`` (positive inside)."""
        x = np.asarray(x, dtype=float)
        x = x / np.linalg.norm(x)
        vals = [np.inf]
        if len(self.halfspaces):
            vals.append(float(np.min(self.halfspaces @ x)))
        for q in self.quadrics:
            vals.append(float(-(x @ q @ x)))
        return min(vals)

    def margins(self, xs) -> np.ndarray:
        xs = _unit_rows(xs)
        out = np.full(len(xs), np.inf)
        if len(self.halfspaces):
            out = np.minimum(out, np.min(xs @ self.halfspaces.T, axis=1))
        for q in self.quadrics:
            out = np.minimum(out, -np.einsum("ij,jk,ik->i", xs, q, xs))
        return out

    def lift(self, x) -> np.ndarray:
        """Unit representative of ``x`` lying in the same nappe as the interior point."""
        x = np.asarray(x, dtype=float)
        x = x / np.linalg.norm(x)
        return x if x @ self.interior >= 0 else -x

    def contains(self, x, margin: float = INTERIOR_MARGIN) -> bool:
        x = np.asarray(x, dtype=float)
        return self.margin(x) > margin or self.margin(-x) > margin

    # constructors ---------------------------------------------------------
    @classmethod
    def from_vertices(cls, vertices, edge_samples: int = 0) -> "ConvexBody":
        """Convex hull of finitely many points, lifted to a common nappe."""
        v = _unit_rows(vertices)
        ell, margin = max_margin_functional(v)
        if margin <= LP_MARGIN:
            ell = _rp_chart(v)
        v = v * np.sign(v @ ell)[:, None]
        h = conic_facets(v)
        interior = v.mean(axis=0)
        samples = [v]
        if edge_samples:
            ts = np.linspace(0, 1, edge_samples + 2)[1:-1]
            for i in range(len(v)):
                for j in range(i + 1, len(v)):
                    seg = np.outer(1 - ts, v[i]) + np.outer(ts, v[j])
                    on_bd = np.min(_unit_rows(seg) @ h.T, axis=1) < 1e-9
                    samples.append(seg[on_bd])
        return cls(v.shape[1] - 1, h, np.vstack(samples), interior, vertices=v)

    @classmethod
    def simplex(cls, dim: int) -> "ConvexBody":
        """Standard simplex {x_i > 0}; facet i is the functional e_i."""
        e = np.eye(dim + 1)
        return cls(dim, e, e, np.ones(dim + 1), vertices=e)

    @classmethod
    def elliptic_ball(cls, center, radius: float, n_samples: int = 720, seed: int = 0) -> "ConvexBody":
        """Ball of the given elliptic radius (< pi/2) about ``center``."""
        c = np.asarray(center, dtype=float)
        c = c / np.linalg.norm(c)
        if not 0 < radius < np.pi / 2:
            raise GeometryError("elliptic ball radius must lie in (0, pi/2)")
        q = np.cos(radius) ** 2 * np.eye(c.size) - np.outer(c, c)
        basis = chart_basis(c)
        if c.size == 3:
            ang = 2 * np.pi * np.arange(n_samples) / n_samples
            u = np.column_stack([np.cos(ang), np.sin(ang)]) @ basis
        elif c.size == 2:
            u = np.vstack([basis[0], -basis[0]])
        else:
            rng = np.random.default_rng(seed)
            u = _unit_rows(rng.normal(size=(n_samples, c.size - 1))) @ basis
        samples = np.cos(radius) * c + np.sin(radius) * u
        return cls(c.size - 1, c[None, :], samples, c, quadrics=(q,))

    @classmethod
    def klein_ball(cls, dim: int, n_samples: int = 720) -> "ConvexBody":
        """Unit ball in the chart x_0 = 1."""
        return cls.elliptic_ball(np.eye(dim + 1)[0], np.pi / 4, n_samples)

    @classmethod
    def affine_patch(cls, dim: int, n_samples: int = 400, seed: int = 0) -> "ConvexBody":
        """The complete affine space {x_0 > 0}; its closure meets the hyperplane at infinity."""
        rng = np.random.default_rng(seed)
        if dim == 1:
            u = np.array([[1.0], [-1.0]])
        elif dim == 2:
            ang = 2 * np.pi * np.arange(n_samples) / n_samples
            u = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            u = _unit_rows(rng.normal(size=(n_samples, dim)))
        samples = np.hstack([np.zeros((len(u), 1)), u])
        e0 = np.eye(dim + 1)[0]
        return cls(dim, e0[None, :], samples, e0, properly_convex=False)

    @classmethod
    def l_shape(cls) -> "ConvexBody":
        """An L-shaped polygon in the chart x_0 = 1 (not convex)."""
        poly = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
        pts = np.hstack([np.ones((len(poly), 1)), poly])
        normals = []
        for i in range(len(pts)):
            a, b = pts[i], pts[(i + 1) % len(pts)]
            # counterclockwise boundary: interior lies to the left
            normals.append(np.cross(a, b))
        interior = np.array([1.0, 0.5, 0.5])
        return cls(2, np.array(normals), pts, interior, vertices=pts, properly_convex=False)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "halfspaces": self.halfspaces.tolist(),
            "samples": self.samples.tolist(),
            "interior": self.interior.tolist(),
        }

    @classmethod
    def from_json(cls, data) -> "ConvexBody":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["dim"]), data["halfspaces"], data["samples"], data["interior"])

    def dual(self, n_gen: int | None = None) -> "ConvexBody":
        return dual_cone(Cone.from_body(self, n_gen)).to_body()


def _rp_chart(v):
    """Chart functional for points of RP^n given up to sign (maximizes min |phi . v|)."""
    # start from the principal direction and improve by sign-fixed max margin LP
    _, _, vt = np.linalg.svd(v)
    ell = vt[0]
    for _ in range(5):
        signs = np.where(v @ ell >= 0, 1.0, -1.0)
        ell_new, margin = max_margin_functional(v * signs[:, None])
        if margin <= LP_MARGIN:
            raise NotProperlyConvex("points are not contained in an affine patch")
        if np.allclose(ell_new, ell):
            break
        ell = ell_new
    return ell


@dataclass(frozen=True, eq=False)
class Cone:
    """Open convex cone, by generators (conic hull) and/or half-spaces."""

    dim_ambient: int
    generators: np.ndarray | None = None
    halfspaces: np.ndarray | None = None

    def __post_init__(self):
        if self.generators is None and self.halfspaces is None:
            raise GeometryError("cone needs generators or half-spaces")
        for name in ("generators", "halfspaces"):
            val = getattr(self, name)
            if val is not None:
                arr = _unit_rows(np.asarray(val, dtype=float).reshape(-1, self.dim_ambient))
                object.__setattr__(self, name, arr)

    @classmethod
    def orthant(cls, dim_ambient: int) -> "Cone":
        e = np.eye(dim_ambient)
        return cls(dim_ambient, e, e)

    @classmethod
    def lorentz(cls, dim_ambient: int, n_gen: int = 2000, seed: int = 0) -> "Cone":
        """{x_0 > ||(x_1, ..., x_n)||}, sampled by ``n_gen`` boundary rays."""
        m = dim_ambient - 1
        if m == 1:
            u = np.array([[1.0], [-1.0]])
        elif m == 2:
            ang = 2 * np.pi * np.arange(n_gen) / n_gen
            u = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            u = _unit_rows(np.random.default_rng(seed).normal(size=(n_gen, m)))
        gens = np.hstack([np.ones((len(u), 1)), u])
        funcs = np.hstack([np.ones((len(u), 1)), -u])
        return cls(dim_ambient, gens, funcs)

    @classmethod
    def from_body(cls, body: ConvexBody, n_gen: int | None = None) -> "Cone":
        gens = body.vertices if body.vertices is not None else body.samples
        if n_gen is not None and len(gens) > n_gen:
            idx = np.linspace(0, len(gens) - 1, n_gen).astype(int)
            gens = gens[idx]
        hs = body.halfspaces if not body.quadrics and body.vertices is not None else None
        return cls(body.dim + 1, gens, hs)

    def ensure_halfspaces(self) -> np.ndarray:
        if self.halfspaces is None:
            object.__setattr__(self, "halfspaces", conic_facets(self.generators))
        return self.halfspaces

    def ensure_generators(self) -> np.ndarray:
        if self.generators is None:
            object.__setattr__(self, "generators", conic_facets(self.halfspaces))
        return self.generators

    def is_properly_convex(self) -> bool:
        if self.generators is not None:
            g = self.generators
            return np.linalg.matrix_rank(g, tol=1e-10) == self.dim_ambient and not contains_line(g)
        h = self.halfspaces
        return np.linalg.matrix_rank(h, tol=1e-10) == self.dim_ambient and not contains_line(h)

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        x = x / np.linalg.norm(x)
        return bool(np.min(self.ensure_halfspaces() @ x) > margin)

    def interior_point(self) -> np.ndarray:
        g = self.ensure_generators()
        x = g.sum(axis=0)
        return x / np.linalg.norm(x)

    def to_body(self) -> ConvexBody:
        g = self.ensure_generators()
        h = self.ensure_halfspaces()
        x = self.interior_point()
        return ConvexBody(self.dim_ambient - 1, h, g, x, vertices=g)


def dual_cone(v: Cone) -> Cone:
    """V* = {phi : phi(v) > 0 for all v in clo(V) - 0}.

    Generators of V* are the facet functionals of V; the half-spaces of V* are
    recomputed by facet enumeration over those generators, so a second dual
    passes through two independent hull computations.
    """
    if not v.is_properly_convex():
        raise NotProperlyConvex("closure of the cone contains a line or has empty interior")
    funcs = v.halfspaces if v.halfspaces is not None else conic_facets(v.generators)
    return Cone(v.dim_ambient, generators=funcs, halfspaces=conic_facets(funcs))


def angle_to_cone(x, generators) -> float:
    """Angle from the ray of ``x`` to the closed conic hull of ``generators``."""
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    w, resid = nnls(np.asarray(generators, dtype=float).T, x)
    p = np.asarray(generators).T @ w
    return float(np.arctan2(resid, max(np.linalg.norm(p), 0.0)))


def one_sided_distance(k1: ConvexBody, k2: ConvexBody) -> float:
    """sup over samples of K1 of the elliptic distance to clo(K2)."""
    gens = k2.vertices if k2.vertices is not None else k2.samples
    best = 0.0
    for p in k1.samples:
        if k2.contains(p, margin=0.0):
            continue
        d = min(angle_to_cone(p, gens), angle_to_cone(-p, gens))
        best = max(best, d)
    return best


def hausdorff_distance(k1: ConvexBody, k2: ConvexBody) -> float:
    if k1.dim != k2.dim:
        raise DimensionMismatch(f"bodies live in RP^{k1.dim} and RP^{k2.dim}")
    return max(one_sided_distance(k1, k2), one_sided_distance(k2, k1))


def _chord_points(samples, n_pairs=2000, seed=0):
    rng = np.random.default_rng(seed)
    k = len(samples)
    if k * (k - 1) // 2 <= n_pairs:
        i, j = np.triu_indices(k, 1)
    else:
        i = rng.integers(k, size=n_pairs)
        j = rng.integers(k, size=n_pairs)
    ts = np.array([0.25, 0.5, 0.75])
    pts = samples[i][:, None, :] * (1 - ts)[None, :, None] + samples[j][:, None, :] * ts[None, :, None]
    return pts.reshape(-1, samples.shape[1])


def properly_convex_check(body: ConvexBody) -> Verdict:
    """Classify a sampled body.

    NotConvex when a boundary sample or a point on a sampled chord violates
    the constraints; ProperlyConvex when some functional is positive (margin
    >= 1e-8) on every sample; ConvexNotProper otherwise.
    """
    s = body.samples
    tol = 1e-9
    if np.any(body.margins(s) < -tol):
        return Verdict.NOT_CONVEX
    chords = _chord_points(s)
    chords = chords[np.linalg.norm(chords, axis=1) > 1e-12]
    if len(chords) and np.any(body.margins(chords) < -tol):
        return Verdict.NOT_CONVEX
    _, margin = max_margin_functional(s)
    if margin >= LP_MARGIN:
        return Verdict.PROPERLY_CONVEX
    return Verdict.CONVEX_NOT_PROPER


def max_chord_length(body: ConvexBody) -> float:
    """Largest elliptic length of a segment between two samples, using cone lifts."""
    s = body.samples
    best = -1.0
    for start in range(0, len(s), 2048):
        c = s[start:start + 2048] @ s.T
        best = max(best, -float(c.min()))
    return float(np.arccos(np.clip(-best, -1.0, 1.0)))


def supporting_halfspaces(body: ConvexBody, at) -> list:
    """A functional vanishing at each point of ``at`` and nonnegative on the body."""
    out = []
    s = body.samples
    gens = body.vertices if body.vertices is not None else s
    for p in at:
        coords = getattr(p, "coords", p)
        x = body.lift(coords)
        if body.margin(x) > BOUNDARY_TOL:
            raise PointNotOnBoundary("point lies in the interior")
        if angle_to_cone(x, gens) > BOUNDARY_TOL and body.margin(x) < -BOUNDARY_TOL:
            raise PointNotOnBoundary("point lies outside the body")
        far = s[np.linalg.norm(s - x, axis=1) > 1e-9]
        phi, margin = max_margin_functional(far, equality=[x])
        if margin < -BOUNDARY_TOL:
            raise PointNotOnBoundary(f"no supporting functional (margin {margin:.3e})")
        out.append(phi)
    return out


def inradius(body: ConvexBody) -> float:
    """Largest elliptic radius of a ball inside a polytopal body."""
    h = body.halfspaces
    x0 = body.interior

    def neg_radius(z):
        return -z[-1]

    cons = [
        {"type": "ineq", "fun": lambda z: h @ z[:-1] - z[-1]},
        {"type": "ineq", "fun": lambda z: 1.0 - z[:-1] @ z[:-1]},
    ]
    z0 = np.r_[x0, max(float(np.min(h @ x0)), 0.0)]
    res = minimize(neg_radius, z0, constraints=cons, method="SLSQP", options={"ftol": 1e-12, "maxiter": 500})
    return float(np.arcsin(np.clip(res.x[-1], 0.0, 1.0)))


def injectivity_radius(body: ConvexBody) -> float:
    """min(inradius of the body, inradius of its dual)."""
    return min(inradius(body), inradius(body.dual()))


def boundary_distance(body: ConvexBody, xs) -> np.ndarray:
    """Elliptic distance from interior points to the boundary of a polytopal body."""
    xs = _unit_rows(xs)
    return np.arcsin(np.clip(np.min(xs @ body.halfspaces.T, axis=1), -1.0, 1.0))


def random_interior_points(body: ConvexBody, count: int, rng) -> np.ndarray:
    """Random convex combinations of the vertices of a polytopal body."""
    v = body.vertices
    w = rng.dirichlet(np.ones(len(v)), size=count)
    return _unit_rows(w @ v)
