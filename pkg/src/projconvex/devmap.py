"""Developing maps of tetrahedral orbifolds built from pasting data.

The fundamental domain is a pair of tetrahedra T1, T2 sharing their face
opposite vertex 3.  T1 is the standard tetrahedron and T2 replaces its
fourth vertex by [2, 2, 2, -1].  Pasting map ``g_i`` sends face i of T1 to
face i of T2 (i = 0, 1, 2) and is specified by frame data: the image of the
opposite vertex ``e_i`` (``apex``) and of the unit point ``e_0 + ... + e_3``
(``unit``), both in homogeneous coordinates relative to the vertices of T2.

The development places M T1 and M T2 for every group element M reached by
breadth-first search over words in the pasting maps and their inverses.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .complexes import DevelopedComplex
from .convex import chart_basis, max_chord_length
from .coxeter import DEFAULT_CAP, canonical_key
from .errors import (
    DegeneratePlacement,
    ExplosionGuard,
    GeometryError,
    NotProperlyConvex,
    VertexNotFixed,
    ZeroCrossRatio,
)

T1 = np.eye(4)
T2 = np.eye(4)
T2[:, 3] = [2.0, 2.0, 2.0, -1.0]
SEED_VERTICES = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [2, 2, 2, -1]], dtype=float)

NAMES = "abc"
DOUBLED_RELATORS = ["aaa", "bbb", "ccc", "AbAbAb", "AcAcAc", "BcBcBc"]
# words generating the stabilizer of each seed vertex of T1
DOUBLED_END_WORDS = {0: ["b", "c"], 1: ["a", "c"], 2: ["a", "b"], 3: ["Ab", "Ac"]}

FACET_TOL = 1e-8
FLAT_TOL = 1e-12
ZERO_TOL = 1e-14


class ConvexityVerdict(str, enum.Enum):
    STRICTLY_CONVEX_SO_FAR = "StrictlyConvexSoFar"
    CONVEX_SO_FAR = "ConvexSoFar"
    NOT_CONVEX = "NotConvex"


class EndClass(str, enum.Enum):
    HOROSPHERICAL = "Horospherical"
    LENS_COMPATIBLE = "LensCompatible"
    TOTALLY_GEODESIC_COMPATIBLE = "TotallyGeodesicCompatible"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class FacePairing:
    name: str
    face: int
    apex: tuple
    unit: tuple


@dataclass(frozen=True)
class GluingData:
    pairings: tuple
    relators: tuple = tuple(DOUBLED_RELATORS)
    end_words: dict = field(default_factory=lambda: dict(DOUBLED_END_WORDS))

    def __post_init__(self):
        faces = [p.face for p in self.pairings]
        if len(set(faces)) != len(faces):
            raise GeometryError("each face of T1 may be paired only once")
        names = [p.name for p in self.pairings]
        if len(set(names)) != len(names) or any(not n.islower() for n in names):
            raise GeometryError("pairing names must be distinct lowercase letters")
        for p in self.pairings:
            if not 0 <= p.face <= 2:
                raise GeometryError("faces 0, 1, 2 of T1 are paired with T2; face 3 is shared")
            for x in (*p.apex, *p.unit):
                if abs(x) < ZERO_TOL:
                    raise ZeroCrossRatio(f"pairing {p.name!r} has a vanishing frame coordinate")

    def params(self) -> np.ndarray:
        return np.concatenate([np.r_[p.apex, p.unit] for p in self.pairings]).astype(float)

    def with_params(self, x) -> "GluingData":
        x = np.asarray(x, dtype=float)
        new = [
            FacePairing(p.name, p.face, tuple(x[8 * k:8 * k + 4]), tuple(x[8 * k + 4:8 * k + 8]))
            for k, p in enumerate(self.pairings)
        ]
        return GluingData(tuple(new), self.relators, dict(self.end_words))

    def generators(self) -> dict:
        """Pasting matrices, lowercase names, normalized to |det| = 1, plus inverses in uppercase."""
        out = {}
        for p in self.pairings:
            g = pasting_matrix(p.face, p.apex, p.unit)
            out[p.name] = g
            out[p.name.upper()] = np.linalg.inv(g)
        return out

    def to_json(self) -> dict:
        return {
            "pairings": [
                {"name": p.name, "face": p.face, "apex": list(p.apex), "unit": list(p.unit)}
                for p in self.pairings
            ],
            "relators": list(self.relators),
            "end_words": {str(k): v for k, v in self.end_words.items()},
        }

    @classmethod
    def from_json(cls, data) -> "GluingData":
        if isinstance(data, str):
            data = json.loads(data)
        pairings = tuple(
            FacePairing(p["name"], int(p["face"]), tuple(map(float, p["apex"])), tuple(map(float, p["unit"])))
            for p in data["pairings"]
        )
        relators = tuple(data.get("relators", DOUBLED_RELATORS))
        ends = {int(k): list(v) for k, v in data.get("end_words", DOUBLED_END_WORDS).items()}
        return cls(pairings, relators, ends)


def _unit_det(m):
    d = np.linalg.det(m)
    if abs(d) < 1e-300:
        raise DegeneratePlacement("pasting map is singular")
    return m / abs(d) ** (1.0 / m.shape[0])


def pasting_matrix(face: int, apex, unit) -> np.ndarray:
    """Projective map sending the frame of T1 to the frame prescribed on T2.

    Vertices of face ``face`` go to the matching vertices of T2, e_face goes
    to ``apex`` and the unit point goes to ``unit`` (coordinates in T2's frame).
    """
    apex = np.asarray(apex, dtype=float)
    unit = np.asarray(unit, dtype=float)
    cols = T2.copy()
    cols[:, face] = T2 @ apex
    if abs(np.linalg.det(cols)) < FLAT_TOL:
        raise DegeneratePlacement("apex lies on the plane of the shared face")
    c = np.linalg.solve(cols, T2 @ unit)
    if np.any(np.abs(c) < ZERO_TOL):
        raise ZeroCrossRatio("unit point lies on a face plane of the target tetrahedron")
    return _unit_det(cols @ np.diag(c) @ np.linalg.inv(T1))


def frame_of(g, face: int):
    """Inverse of ``pasting_matrix``: frame data of a map sending T1 across face i of T2."""
    g = np.asarray(g, dtype=float)
    apex = np.linalg.solve(T2, g @ T1[:, face])
    unit = np.linalg.solve(T2, g @ T1.sum(axis=1))
    return apex, unit


def word_matrix(gens: dict, word: str) -> np.ndarray:
    m = np.eye(4)
    for ch in word:
        m = m @ gens[ch]
    return m


def doubled_cartan_normalization(cartan) -> np.ndarray:
    """Diagonal conjugate of a tetrahedral Cartan matrix with R_3 e_3 = [2, 2, 2, -1]."""
    a = np.asarray(cartan, dtype=float)
    if np.any(a[:3, 3] >= 0):
        raise GeometryError("facet 3 must meet the other three facets at finite angles")
    d = np.r_[-2.0 / a[:3, 3], 1.0]
    return np.diag(d) @ a @ np.diag(1.0 / d)


def doubled_reflection_gluing(cartan) -> GluingData:
    """Pasting data of the doubled reflection tetrahedron: g_i = R_3 R_i."""
    a = doubled_cartan_normalization(cartan)
    refl = [np.eye(4) - np.outer(a[:, i], np.eye(4)[i]) for i in range(4)]
    if not np.allclose(refl[3] @ T1, T2):
        raise GeometryError("normalized reflection does not produce the seed T2")
    pairings = []
    for i in range(3):
        apex, unit = frame_of(refl[3] @ refl[i], i)
        pairings.append(FacePairing(NAMES[i], i, tuple(apex), tuple(unit)))
    return GluingData(tuple(pairings))


def hyperbolic_gluing() -> GluingData:
    """The complete hyperbolic structure: all Cartan entries -1."""
    return doubled_reflection_gluing(3 * np.eye(4) - np.ones((4, 4)))


def _same_facet(a, b, tol=FACET_TOL) -> bool:
    """Two vertex sets (rows) agree as sets of projective points."""
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    used = set()
    for row in a:
        hit = None
        for j, other in enumerate(b):
            if j not in used and 1.0 - abs(row @ other) < tol:
                hit = j
                break
        if hit is None:
            return False
        used.add(hit)
    return True


def _flatness(cell) -> float:
    v = cell / np.linalg.norm(cell, axis=1, keepdims=True)
    return abs(np.linalg.det(v))


def develop(data: GluingData, depth_max: int, cap: int = DEFAULT_CAP) -> DevelopedComplex:
    """Breadth-first development of T1 and T2 under the pasting group."""
    gens = data.generators()
    letters = [p.name for p in data.pairings] + [p.name.upper() for p in data.pairings]
    face_of = {p.name: p.face for p in data.pairings}
    elems = [("", np.eye(4), 0)]
    parents = [None]
    seen = {canonical_key(np.eye(4))}
    frontier = [(0, "", np.eye(4))]
    for depth in range(1, depth_max + 1):
        nxt = []
        for idx, word, m in frontier:
            for ch in letters:
                if word and ch == word[-1].swapcase():
                    continue
                p = m @ gens[ch]
                k = canonical_key(p)
                if k in seen:
                    continue
                seen.add(k)
                nxt.append((word + ch, p, idx))
                if len(seen) > cap:
                    raise ExplosionGuard(f"more than {cap} elements at depth {depth}")
        nxt.sort(key=lambda t: t[0])
        frontier = []
        for word, p, parent in nxt:
            frontier.append((len(elems), word, p))
            elems.append((word, p, depth))
            parents.append((parent, word[-1]))
        if not nxt:
            break

    cells = []
    words = []
    depths = []
    for word, m, depth in elems:
        for seed in (T1, T2):
            cell = (m @ seed).T
            if _flatness(cell) < FLAT_TOL:
                raise DegeneratePlacement(f"placed tetrahedron for word {word!r} is flat")
            cells.append(cell)
            words.append(word)
            depths.append(depth)
    cells = np.array(cells)

    adjacency = [(0, 1, 3, 3)]
    for e in range(1, len(elems)):
        adjacency.append((2 * e, 2 * e + 1, 3, 3))
        parent, ch = parents[e]
        face = face_of[ch.lower()]
        if ch.islower():
            pair = (2 * parent + 1, 2 * e, face, face)
        else:
            pair = (2 * parent, 2 * e + 1, face, face)
        adjacency.append(pair)
    for a, b, ia, ib in adjacency:
        fa = np.delete(cells[a], ia, axis=0)
        fb = np.delete(cells[b], ib, axis=0)
        if not _same_facet(fa, fb):
            raise DegeneratePlacement(f"cells {a} and {b} do not share a facet")

    cx = DevelopedComplex(
        cells,
        words,
        depths,
        n_seeds=2,
        holonomy={k: v for k, v in gens.items() if k.islower()},
        end_vertices=[SEED_VERTICES[k] for k in range(4)],
        elements=[m for _, m, _ in elems],
        adjacency=adjacency,
        relators=list(data.relators),
    )
    return cx


def seeds_only() -> DevelopedComplex:
    return DevelopedComplex(np.array([T1.T, T2.T]), ["", ""], [0, 0], n_seeds=2,
                            end_vertices=[SEED_VERTICES[k] for k in range(4)],
                            adjacency=[(0, 1, 3, 3)])


def _proj_residual(p) -> float:
    """Distance of a matrix (|det| = 1) from +-I."""
    p = _unit_det(p)
    e = np.eye(p.shape[0])
    return float(min(np.max(np.abs(p - e)), np.max(np.abs(p + e))))


def relator_residuals(data: GluingData) -> dict:
    gens = data.generators()
    return {r: _proj_residual(word_matrix(gens, r)) for r in data.relators}


def holonomy_residuals(cx: DevelopedComplex) -> dict:
    """Relator residuals from the holonomy stored in a complex (inverses in uppercase)."""
    gens = {}
    for name, g in cx.holonomy.items():
        g = np.asarray(g, dtype=float)
        gens[name] = g
        gens[name.upper()] = np.linalg.inv(g)
    n = cx.ambient
    out = {}
    for r in cx.relators:
        m = np.eye(n)
        for ch in r:
            m = m @ gens[ch]
        out[r] = _proj_residual(m)
    return out


def _relator_vector(data: GluingData, x) -> np.ndarray:
    gens = data.with_params(x).generators()
    out = []
    for r in data.relators:
        p = _unit_det(word_matrix(gens, r))
        out.append((p - np.trace(p) / 4.0 * np.eye(4)).ravel())
    return np.concatenate(out)


def _relator_jacobian(data: GluingData, x, step=1e-6) -> np.ndarray:
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((_relator_vector(data, x + e) - _relator_vector(data, x - e)) / (2 * step))
    return np.column_stack(cols)


def _gauge(x) -> np.ndarray:
    """Directions that rescale one homogeneous frame vector (no effect on the maps)."""
    cols = []
    for k in range(x.size // 4):
        v = np.zeros_like(x)
        v[4 * k:4 * k + 4] = x[4 * k:4 * k + 4]
        cols.append(v)
    return np.column_stack(cols)


def relator_tangent_space(data: GluingData, rank_tol: float = 1e-6):
    """Tangent directions of the relator variety modulo frame rescaling.

    Returns (basis, rank_of_jacobian).  The basis columns live in the
    frame-parameter space of ``data.params()``.
    """
    x = data.params()
    jac = _relator_jacobian(data, x)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    null = null_space(jac, rcond=rank_tol)
    g = _gauge(x)
    # remove the gauge directions from the null space
    q, _ = np.linalg.qr(g)
    rest = null - q @ (q.T @ null)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    basis = u[:, s > 1e-6]
    return basis, rank


def _newton(data, x, tol, max_iter):
    # the residual map has extra near-zero singular values off the variety;
    # truncating them keeps the Gauss-Newton steps short
    for _ in range(max_iter):
        r = _relator_vector(data, x)
        if np.max(np.abs(r)) < tol:
            break
        jac = _relator_jacobian(data, x)
        dx, *_ = np.linalg.lstsq(jac, -r, rcond=1e-4)
        x = x + dx
    return x


def deform(data: GluingData, coefficients, step: float = 1.0, tol: float = 1e-12,
           max_iter: int = 50, substep: float = 0.02) -> GluingData:
    """Move along the tangent space and project back onto the relator variety.

    The displacement is split into pieces of length at most ``substep``,
    each followed by a Newton correction, so large moves track the variety.
    """
    basis, _ = relator_tangent_space(data)
    d = step * basis @ np.asarray(coefficients, dtype=float)
    n = max(1, int(np.ceil(np.linalg.norm(d) / substep)))
    x = data.params()
    for _ in range(n):
        x = _newton(data, x + d / n, tol, max_iter)
    out = data.with_params(x)
    worst = max(relator_residuals(out).values())
    if worst > 1e-8:
        raise GeometryError(f"deformation left the relator variety (residual {worst:.2e})")
    return out


@dataclass
class ConfinementReport:
    halfspaces: list
    max_violation: float
    max_chord: float
    eps0: float
    passed: bool


def _supporting_at(v, others, center):
    """Functional vanishing at v, normalized by phi(center) = 1, maximizing min phi(others).

    The optimum is negative when v is interior to the cone over ``others``.
    """
    dim = v.size
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-others, np.ones((len(others), 1))])
    a_eq = np.vstack([np.r_[v, 0.0], np.r_[center, 0.0]])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(others)), A_eq=a_eq, b_eq=[0.0, 1.0],
                  bounds=[(None, None)] * dim + [(None, 1)], method="highs")
    if res.status != 0:
        return np.zeros(dim), -np.inf
    phi = res.x[:dim] / np.linalg.norm(res.x[:dim])
    return phi, float(np.min(others @ phi))


def confinement_check(cx: DevelopedComplex, eps0: float = 0.1, violation_tol: float = 1e-8) -> ConfinementReport:
    """Supporting half-spaces at the five seed vertices and the chord bound of the union.

    A complex that does not fit in any affine patch fails with infinite violation.
    """
    try:
        ell = cx.chart()
    except NotProperlyConvex:
        return ConfinementReport([], float("inf"), float(np.pi), eps0, False)
    verts = cx.unique_vertices()
    verts = verts * np.sign(verts @ ell)[:, None]
    center = verts.mean(axis=0)
    center /= np.linalg.norm(center)
    halfspaces = []
    worst = 0.0
    for v in SEED_VERTICES:
        v = v / np.linalg.norm(v)
        v = v * np.sign(v @ ell)
        others = verts[1.0 - np.abs(verts @ v) > 1e-12]
        phi, margin = _supporting_at(v, others, center)
        halfspaces.append(phi)
        worst = max(worst, -margin)
    body = cx.to_body()
    chord = max_chord_length(body)
    passed = worst <= violation_tol and chord <= np.pi - eps0
    return ConfinementReport(halfspaces, float(worst), float(chord), eps0, bool(passed))


def _adjacent_pairs_ok(cx, ell) -> bool:
    lc = cx.lifted_cells(ell)
    for a, b, ia, ib in cx.adjacency:
        facet = np.delete(lc[a], ia, axis=0)
        normal = null_space(facet)[:, 0]
        sa = normal @ lc[a][ia]
        sb = normal @ lc[b][ib]
        if sa * sb >= 0:
            return False
    return True


def _chord_test(cx, ell, n_chords, seed, slack, core_depth):
    rng = np.random.default_rng(seed)
    depths = np.asarray(cx.depths)
    core = np.flatnonzero(depths <= core_depth)
    lc = cx.lifted_cells(ell)
    a = rng.choice(core, n_chords)
    b = rng.choice(core, n_chords)
    k = lc.shape[1]
    wa = rng.dirichlet(np.full(k, 3.0), n_chords)
    wb = rng.dirichlet(np.full(k, 3.0), n_chords)
    pa = np.einsum("ki,kij->kj", wa, lc[a])
    pb = np.einsum("ki,kij->kj", wb, lc[b])
    ts = np.linspace(0, 1, 9)[1:-1]
    pts = (pa[:, None, :] * (1 - ts)[None, :, None] + pb[:, None, :] * ts[None, :, None]).reshape(-1, lc.shape[2])
    return float(cx.union_slack(pts, ell).min()) >= -slack


def _collinear_hull_triples(cx, ell):
    """Triples of collinear hull vertices lying on a common hull facet."""
    verts = cx.unique_vertices()
    verts = verts * np.sign(verts @ ell)[:, None]
    basis = chart_basis(ell)
    y = (verts / (verts @ ell)[:, None]) @ basis.T
    if y.shape[1] < 2 or len(y) <= y.shape[1]:
        return []
    hull = ConvexHull(y)
    scale = np.max(np.abs(y))
    out = []
    for eq in np.unique(np.round(hull.equations, 9), axis=0):
        on = np.flatnonzero(np.abs(y @ eq[:-1] + eq[-1]) < 1e-9 * max(1.0, scale))
        if len(on) < 3:
            continue
        for tri in itertools.combinations(on, 3):
            d1 = y[tri[1]] - y[tri[0]]
            d2 = y[tri[2]] - y[tri[0]]
            cross = np.linalg.norm(np.cross(d1, d2)) if len(d1) == 3 else abs(d1[0] * d2[1] - d1[1] * d2[0])
            if cross < 1e-9 * max(1.0, np.linalg.norm(d1) * np.linalg.norm(d2)):
                out.append(tuple(verts[list(tri)]))
    return out


def _in_end_star(cx, triple, ell) -> bool:
    lc = cx.all_vertices().reshape(cx.cells.shape)
    ends = [np.asarray(e, dtype=float) for e in cx.end_vertices]
    if not ends:
        return False
    for w in ends:
        w = w / np.linalg.norm(w)
        star = [c for c in lc if np.any(1.0 - np.abs(c @ w) < 1e-9)]
        if not star:
            continue
        pool = np.vstack(star)
        if all(np.any(1.0 - np.abs(pool @ (p / np.linalg.norm(p))) < 1e-9) for p in triple):
            return True
    return False


def convexity_verdict(cx: DevelopedComplex, n_chords: int = 2000, seed: int = 0,
                      slack: float = 1e-6, core_depth: int | None = None) -> ConvexityVerdict:
    """Finite-depth convexity verdict.

    NotConvex when two facet-adjacent cells fold onto the same side of their
    shared facet, or when a random chord between points of the core cells
    (depth <= max depth - 3) leaves the union.  Strictness additionally asks
    that no three collinear hull vertices share a hull facet unless they lie
    in the star of one end vertex.
    """
    ell = cx.chart()
    if not _adjacent_pairs_ok(cx, ell):
        return ConvexityVerdict.NOT_CONVEX
    if core_depth is None:
        core_depth = max(0, max(cx.depths) - 3)
    if not _chord_test(cx, ell, n_chords, seed, slack, core_depth):
        return ConvexityVerdict.NOT_CONVEX
    for triple in _collinear_hull_triples(cx, ell):
        if not _in_end_star(cx, triple, ell):
            return ConvexityVerdict.CONVEX_SO_FAR
    return ConvexityVerdict.STRICTLY_CONVEX_SO_FAR


# ends ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EndDescriptor:
    vertex: np.ndarray
    generators: tuple

    def __post_init__(self):
        v = np.asarray(self.vertex, dtype=float)
        v = v / np.linalg.norm(v)
        object.__setattr__(self, "vertex", v)
        gens = tuple(np.asarray(getattr(g, "matrix", g), dtype=float) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            image = g @ v
            off = image - (image @ v) * v
            if np.linalg.norm(off) > 1e-8 * np.linalg.norm(g):
                raise VertexNotFixed("a generator does not fix the end vertex")

    def conjugate(self, h) -> "EndDescriptor":
        h = np.asarray(getattr(h, "matrix", h), dtype=float)
        hinv = np.linalg.inv(h)
        return EndDescriptor(h @ self.vertex, tuple(h @ g @ hinv for g in self.generators))


def end_descriptors(data: GluingData, products: bool = True) -> list:
    """One descriptor per seed vertex of T1, from the stabilizer words in ``data``.

    With ``products`` the generators are supplemented by their pairwise
    products and quotients, which carry the translational part of the end.
    """
    gens = data.generators()
    out = []
    for k in sorted(data.end_words):
        mats = [word_matrix(gens, w) for w in data.end_words[k]]
        if products:
            extra = []
            for a, b in itertools.combinations(mats, 2):
                extra += [a @ b, a @ np.linalg.inv(b)]
            mats = mats + extra
        out.append(EndDescriptor(SEED_VERTICES[k], tuple(mats)))
    return out


def clustered_eigenvalues(g, rel_tol: float = 1e-4):
    """Eigenvalues with each cluster of nearly equal values replaced by its mean.

    A perturbed k x k Jordan block scatters its eigenvalue by about eps^(1/k)
    but the cluster mean stays accurate to O(eps).  Returns (values, sizes).
    """
    w = np.linalg.eigvals(np.asarray(g, dtype=float))
    scale = max(1.0, float(np.max(np.abs(w))))
    remaining = list(w)
    values, sizes = [], []
    while remaining:
        cluster = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for lam in list(remaining):
                if min(abs(lam - c) for c in cluster) < rel_tol * scale:
                    cluster.append(lam)
                    remaining.remove(lam)
                    grew = True
        values.append(complex(np.mean(cluster)))
        sizes.append(len(cluster))
    return np.array(values), sizes


def _normalized(g):
    g = np.asarray(g, dtype=float)
    return g / abs(np.linalg.det(g)) ** (1.0 / g.shape[0])


def _is_unimodular(g, tol):
    vals, _ = clustered_eigenvalues(_normalized(g))
    return bool(np.all(np.abs(np.abs(vals) - 1.0) <= tol))


def _is_diagonalizable(g, tol=1e-7):
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    vals, sizes = clustered_eigenvalues(g)
    scale = max(1.0, float(np.max(np.abs(vals))))
    for lam, alg in zip(vals, sizes):
        if alg == 1:
            continue
        geo = n - np.linalg.matrix_rank(g - lam * np.eye(n), tol=1e-6 * scale)
        if geo < alg:
            return False
    return True


def _lens_ok(g, v, margin):
    g = _normalized(g)
    lam0 = float(v @ g @ v)
    if lam0 < 0:
        g, lam0 = -g, -lam0
    w, _ = clustered_eigenvalues(g)
    if np.any(np.abs(w.imag) > 1e-8 * np.max(np.abs(w))) or np.any(w.real <= 0):
        return False
    if not _is_diagonalizable(g):
        return False
    lo, hi = float(np.min(w.real)), float(np.max(w.real))
    return lo * (1 + margin) < lam0 < hi * (1 - margin)


def _common_dual_fixed(gens, v, tol=1e-6):
    rows = []
    for g in gens:
        g = _normalized(g)
        lam0 = float(v @ g @ v)
        rows.append(g.T - lam0 * np.eye(len(v)))
    null = null_space(np.vstack(rows), rcond=tol)
    return null.size and np.max(np.abs(v @ null)) > tol


def classify_end(end: EndDescriptor, tol: float = 1e-6, totally_geodesic: bool = False) -> EndClass:
    """Eigenvalue classification of a radial end.

    Horospherical: every generator has all eigenvalue moduli 1.
    LensCompatible: every nonelliptic generator is diagonalizable with
    positive eigenvalues and its eigenvalue at the vertex lies strictly
    between its extreme eigenvalues.  With ``totally_geodesic`` the lens case
    is refined when the generators also share an invariant hyperplane
    missing the vertex.
    """
    gens = end.generators
    unimodular = [_is_unimodular(g, tol) for g in gens]
    if all(unimodular):
        return EndClass.HOROSPHERICAL
    v = end.vertex
    for g, uni in zip(gens, unimodular):
        if uni and _is_diagonalizable(_normalized(g)):
            continue  # elliptic
        if not _lens_ok(g, v, tol):
            return EndClass.UNCLASSIFIED
    if totally_geodesic and _common_dual_fixed(gens, v, tol):
        return EndClass.TOTALLY_GEODESIC_COMPATIBLE
    return EndClass.LENS_COMPATIBLE
