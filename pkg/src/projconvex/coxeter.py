"""Vinberg reflection groups of a convex polytope.

Facet i of the polytope is the functional alpha_i (inside where positive).
Each reflection is R_i = I - v_i (x) alpha_i with alpha_i(v_i) = 2, and the
Cartan matrix is a_ij = alpha_i(v_j).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import DevelopedComplex
from .convex import ConvexBody, chart_basis, hausdorff_distance
from .errors import ExplosionGuard, InconsistentOrders, NonRealizableCartan
from .projcore import ProjMap

GENERATOR_NAMES = "abcdefghijklmnopqrstuvwxyz"
KEY_DECIMALS = 8
DEFAULT_CAP = 200_000


@dataclass(frozen=True)
class DeformationParams:
    """Positive scalings lambda_ij of the off-diagonal Cartan pairs (i < j)."""

    lambdas: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, lam in self.lambdas.items():
            if lam <= 0:
                raise NonRealizableCartan(f"lambda{key} must be positive, got {lam}")

    def get(self, i: int, j: int) -> float:
        if i < j:
            return float(self.lambdas.get((i, j), 1.0))
        return 1.0 / float(self.lambdas.get((j, i), 1.0))


@dataclass(eq=False)
class CoxeterSystem:
    polytope: ConvexBody
    orders: np.ndarray
    cartan: np.ndarray
    alphas: np.ndarray
    vs: np.ndarray
    reflections: list

    @property
    def rank(self) -> int:
        return len(self.reflections)

    @property
    def names(self) -> str:
        return GENERATOR_NAMES[: self.rank]

    def matrices(self) -> list:
        return [r.matrix for r in self.reflections]


def _check_orders(orders, m):
    orders = np.asarray(orders, dtype=int)
    if orders.shape != (m, m):
        raise InconsistentOrders(f"orders must be {m}x{m}, got {orders.shape}")
    if not np.array_equal(orders, orders.T):
        raise InconsistentOrders("orders must be symmetric")
    if np.any(np.diag(orders) != 1):
        raise InconsistentOrders("diagonal orders must be 1")
    off = orders[~np.eye(m, dtype=bool)]
    # 0 marks nonadjacent facets, -1 marks infinite order
    if np.any((off == 1) | (off < -1)):
        raise InconsistentOrders("edge orders must be >= 2, 0 (nonadjacent) or -1 (infinite)")
    return orders


def cartan_matrix(orders, params: DeformationParams | None = None) -> np.ndarray:
    """a_ii = 2, a_ij = -lambda_ij 2cos(pi/n_ij), a_ji = -2cos(pi/n_ij)/lambda_ij."""
    params = params or DeformationParams()
    orders = np.asarray(orders, dtype=int)
    m = len(orders)
    a = 2.0 * np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            n = orders[i, j]
            if n == 0:
                continue
            c = 2.0 if n == -1 else 2.0 * np.cos(np.pi / n)
            if n == 2:
                continue
            lam = params.get(i, j)
            a[i, j] = -lam * c
            a[j, i] = -c / lam
    return a


def system_from_cartan(polytope: ConvexBody, orders, cartan) -> CoxeterSystem:
    """Realize a Cartan matrix on the facets of ``polytope``."""
    alphas = np.asarray(polytope.halfspaces, dtype=float)
    m = len(alphas)
    orders = _check_orders(orders, m)
    cartan = np.asarray(cartan, dtype=float)
    vs = np.zeros_like(alphas)
    for i in range(m):
        sol, *_ = np.linalg.lstsq(alphas, cartan[:, i], rcond=None)
        if np.max(np.abs(alphas @ sol - cartan[:, i])) > 1e-9:
            raise NonRealizableCartan(f"no vector v_{i} realizes column {i} of the Cartan matrix")
        vs[i] = sol
    refl = []
    n1 = alphas.shape[1]
    for i in range(m):
        r = np.eye(n1) - np.outer(vs[i], alphas[i])
        if np.max(np.abs(r @ r - np.eye(n1))) > 1e-12:
            raise NonRealizableCartan(f"R_{i} is not an involution")
        refl.append(ProjMap(r))
    _check_cartan(cartan, orders)
    return CoxeterSystem(polytope, orders, cartan, alphas, vs, refl)


def _check_cartan(a, orders):
    m = len(a)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            if a[i, j] > 1e-12:
                raise NonRealizableCartan(f"a_{i}{j} = {a[i, j]} is positive")
            if (abs(a[i, j]) < 1e-12) != (abs(a[j, i]) < 1e-12):
                raise NonRealizableCartan(f"a_{i}{j} and a_{j}{i} must vanish together")
            n = orders[i, j]
            if n >= 2 and abs(a[i, j] * a[j, i] - 4 * np.cos(np.pi / n) ** 2) > 1e-10:
                raise NonRealizableCartan(f"a_{i}{j} a_{j}{i} does not match order {n}")


def cartan_from_orders(polytope: ConvexBody, orders, params: DeformationParams | None = None) -> CoxeterSystem:
    m = len(polytope.halfspaces)
    orders = _check_orders(orders, m)
    return system_from_cartan(polytope, orders, cartan_matrix(orders, params))


def all_orders(m: int, n: int) -> np.ndarray:
    """Orders matrix of a simplex with every edge of order n."""
    o = np.full((m, m), n, dtype=int)
    np.fill_diagonal(o, 1)
    return o


@dataclass
class RelationReport:
    max_residual: float
    residuals: dict
    minimal: bool
    non_minimal_pairs: list

    @property
    def passed(self) -> bool:
        return self.minimal and self.max_residual <= 1e-10


def relation_check(sys: CoxeterSystem, minimality_tol: float = 1e-6) -> RelationReport:
    mats = sys.matrices()
    n1 = mats[0].shape[0]
    eye = np.eye(n1)
    residuals = {}
    bad = []
    for i in range(sys.rank):
        for j in range(i + 1, sys.rank):
            n = int(sys.orders[i, j])
            if n < 2:
                continue
            p = mats[i] @ mats[j]
            acc = eye.copy()
            for k in range(1, n):
                acc = acc @ p
                if np.max(np.abs(acc - eye)) < minimality_tol:
                    bad.append((i, j, k))
            acc = acc @ p
            residuals[(i, j)] = float(np.max(np.abs(acc - eye)))
    worst = max(residuals.values()) if residuals else 0.0
    return RelationReport(worst, residuals, not bad, bad)


def canonical_key(m, decimals: int = KEY_DECIMALS) -> bytes:
    """Dedup key: |det| = 1, first significant entry positive, rounded."""
    m = np.asarray(m, dtype=float)
    m = m / abs(np.linalg.det(m)) ** (1.0 / m.shape[0])
    flat = m.ravel()
    idx = np.flatnonzero(np.abs(flat) > 10.0 ** (-decimals + 1))[0]
    m = m * np.sign(flat[idx])
    return (np.round(m, decimals) + 0.0).tobytes()


def enumerate_group(generators, names, word_length_max: int, cap: int = DEFAULT_CAP,
                    key=canonical_key):
    """Breadth-first enumeration of group elements by word length.

    Returns a list of (word, matrix, depth) ordered by depth and then by word.
    Words extend on the right: the element of ``w + x`` is M_w @ M_x.
    """
    n1 = generators[0].shape[0]
    out = [("", np.eye(n1), 0)]
    seen = {key(np.eye(n1))}
    frontier = [("", np.eye(n1))]
    for depth in range(1, word_length_max + 1):
        nxt = []
        for word, m in frontier:
            for name, g in zip(names, generators):
                p = m @ g
                k = key(p)
                if k in seen:
                    continue
                seen.add(k)
                nxt.append((word + name, p))
                if len(seen) > cap:
                    raise ExplosionGuard(f"more than {cap} group elements at depth {depth}")
        nxt.sort(key=lambda t: t[0])
        out.extend((w, p, depth) for w, p in nxt)
        frontier = nxt
        if not nxt:
            break
    return out


def fundamental_orbit(sys: CoxeterSystem, word_length_max: int, cap: int = DEFAULT_CAP) -> DevelopedComplex:
    """Images of the polytope under group elements of word length <= word_length_max."""
    verts = sys.polytope.vertices
    if verts is None:
        raise NonRealizableCartan("fundamental orbit needs a polytope with known vertices")
    elems = enumerate_group(sys.matrices(), sys.names, word_length_max, cap)
    cells = np.array([(m @ verts.T).T for _, m, _ in elems])
    return DevelopedComplex(
        cells,
        [w for w, _, _ in elems],
        [d for _, _, d in elems],
        n_seeds=1,
        holonomy={name: m for name, m in zip(sys.names, sys.matrices())},
        elements=[m for _, m, _ in elems],
        relators=coxeter_relators(sys),
        kind="orbit",
    )


def coxeter_relators(sys: CoxeterSystem) -> list:
    """Words r_i r_i and (r_i r_j)^n_ij for finite orders."""
    names = sys.names
    out = [2 * c for c in names]
    for i in range(sys.rank):
        for j in range(i + 1, sys.rank):
            n = int(sys.orders[i, j])
            if n >= 2:
                out.append((names[i] + names[j]) * n)
    return out


def tits_ball_sizes(orders, depth: int) -> list:
    """Sphere sizes of the Coxeter group in its Tits representation, in exact integers.

    Only orders 2, 3 and infinity are supported, where 2cos(pi/n) is an
    integer, so the reflection matrices have integer entries.
    """
    orders = np.asarray(orders, dtype=int)
    m = len(orders)
    b = np.zeros((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            n = orders[i, j]
            if i == j:
                b[i, j] = 2
            elif n == 2 or n == 0:
                b[i, j] = 0
            elif n == 3:
                b[i, j] = -1
            elif n == -1:
                b[i, j] = -2
            else:
                raise ValueError("integer Tits form needs orders in {2, 3, inf}")
    gens = []
    for i in range(m):
        r = [[int(k == l) for l in range(m)] for k in range(m)]
        # sigma_i(e_k) = e_k - b_ik e_i ; column k of the matrix
        for k in range(m):
            r[i][k] -= b[i, k]
        gens.append(tuple(tuple(row) for row in r))

    def mul(x, y):
        return tuple(
            tuple(sum(x[a][c] * y[c][b2] for c in range(m)) for b2 in range(m)) for a in range(m)
        )

    ident = tuple(tuple(int(a == b2) for b2 in range(m)) for a in range(m))
    seen = {ident}
    frontier = [ident]
    sizes = [1]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        sizes.append(len(nxt))
        frontier = nxt
    return sizes


def minimum_volume_ellipse(points, tol: float = 1e-10, max_iter: int = 10_000):
    """Khachiyan's algorithm: center c and shape E with (y-c)^T E (y-c) <= 1."""
    p = np.asarray(points, dtype=float)
    n, d = p.shape
    q = np.vstack([p.T, np.ones(n)])
    u = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        x = q @ (u[:, None] * q.T)
        m = np.einsum("ij,ji->i", q.T, np.linalg.solve(x, q))
        j = int(np.argmax(m))
        step = (m[j] - d - 1.0) / ((d + 1.0) * (m[j] - 1.0))
        new = (1.0 - step) * u
        new[j] += step
        if np.linalg.norm(new - u) < tol:
            u = new
            break
        u = new
    c = p.T @ u
    cov = p.T @ (u[:, None] * p) - np.outer(c, c)
    e = np.linalg.inv(cov) / d
    return c, e


def ellipse_body(center, shape, ell, n_samples: int = 720) -> ConvexBody:
    """Projective body bounded by the chart ellipse (y-c)^T E (y-c) < 1 in {ell = 1}."""
    ell = np.asarray(ell, dtype=float)
    basis = chart_basis(ell)
    w, v = np.linalg.eigh(shape)
    ang = 2 * np.pi * np.arange(n_samples) / n_samples
    d = len(center)
    if d == 2:
        circ = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        rng = np.random.default_rng(0)
        circ = rng.normal(size=(n_samples, d))
        circ /= np.linalg.norm(circ, axis=1, keepdims=True)
    ys = center + (circ / np.sqrt(w)) @ v.T
    samples = ell[None, :] + ys @ basis
    interior = ell + center @ basis
    # homogeneous quadric: x = s ell + B^T y, y = B x / (ell.x)
    lift = np.vstack([basis, ell])  # rows: coordinates (y, s) of x
    qy = np.zeros((d + 1, d + 1))
    qy[:d, :d] = shape
    qy[:d, d] = qy[d, :d] = -shape @ center
    qy[d, d] = center @ shape @ center - 1.0
    q = lift.T @ qy @ lift
    return ConvexBody(len(ell) - 1, ell[None, :], samples, interior, quadrics=(q,))


def orbit_ellipse_distance(cx: DevelopedComplex, n_samples: int = 720):
    """Elliptic Hausdorff distance between the orbit hull and its minimum-volume ellipse."""
    hull = cx.to_body()
    ell = cx.chart()
    basis = chart_basis(ell)
    pts = (hull.vertices / (hull.vertices @ ell)[:, None]) @ basis.T
    c, e = minimum_volume_ellipse(pts)
    # guard against round-off leaving hull vertices a hair outside
    e = e / max(1.0, float(np.max(np.einsum("ij,jk,ik->i", pts - c, e, pts - c))))
    body = ellipse_body(c, e, ell, n_samples)
    return hausdorff_distance(hull, body), body
