"""Projective invariants of (p1, p2, p3) triangle end orbifolds.

Each end orbifold is split into a front and a back triangle.  With
rho_i(s) = s^2 + s tau_i + 1 and tau_i = 2 cos(2 pi / p_i):

    front:  rho_1, rho_2, rho_3,            sigma = (t rho_2,       rho_1 rho_3 / t)
    back:   rho_1/s^2, rho_2/s^2, rho_3/s^2, sigma = (t rho_2 / s^3, rho_1 rho_3 / (s^3 t))

For the doubled tetrahedron the four ends sit at the tetrahedron vertices.
End k's cone points are the three tetrahedron edges through vertex k, and
the edge cross-ratios must agree between the two ends sharing an edge.
The first sigma-invariants of the four front triangles multiply to 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrder, NonpositiveParameter, WrongOrders

S_TOL = 1e-9
T_TOL = 1e-6
EDGES = list(itertools.combinations(range(4), 2))


def tau(order: int) -> float:
    if int(order) != order or order < 2:
        raise InvalidOrder(f"cone-point order must be an integer >= 2, got {order}")
    return 2.0 * math.cos(2.0 * math.pi / order)


@dataclass(frozen=True)
class EndOrbifoldParams:
    orders: tuple = (3, 3, 3)
    s: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if self.s <= 0 or self.t <= 0:
            raise NonpositiveParameter("Goldman parameters s, t must be positive")
        for p in self.orders:
            tau(p)


@dataclass(frozen=True)
class InvariantSet:
    rho: tuple
    sigma: tuple

    def relation_residual(self) -> float:
        return abs(self.rho[0] * self.rho[1] * self.rho[2] - self.sigma[0] * self.sigma[1])


def _rhos(p: EndOrbifoldParams):
    s = p.s
    return tuple(s * s + s * tau(o) + 1.0 for o in p.orders)


def triangle_invariants_front(p: EndOrbifoldParams) -> InvariantSet:
    r1, r2, r3 = _rhos(p)
    out = InvariantSet((r1, r2, r3), (p.t * r2, r1 * r3 / p.t))
    assert out.relation_residual() <= 1e-9 * max(1.0, abs(r1 * r2 * r3))
    return out


def triangle_invariants_back(p: EndOrbifoldParams) -> InvariantSet:
    r1, r2, r3 = _rhos(p)
    s2, s3 = p.s ** 2, p.s ** 3
    out = InvariantSet((r1 / s2, r2 / s2, r3 / s2), (p.t * r2 / s3, r1 * r3 / (s3 * p.t)))
    assert out.relation_residual() <= 1e-9 * max(1.0, abs(out.rho[0] * out.rho[1] * out.rho[2]))
    return out


def product_constant(s: float) -> float:
    """C(s) with t_1 t_2 t_3 t_4 = C(s) on the doubled tetrahedron, for orders (3,3,3)."""
    return (s * s - s + 1.0) ** -4


def edge_slot(vertex: int, edge) -> int:
    """Index (0, 1, 2) of ``edge`` among the edges through ``vertex``, in increasing order of the far end."""
    others = [w for w in range(4) if w != vertex]
    far = edge[1] if edge[0] == vertex else edge[0]
    return others.index(far)


def constraint_residuals(x) -> np.ndarray:
    """Gluing equations in the flat coordinates x = (s_1, t_1, ..., s_4, t_4).

    Edge matching for front and back triangles, then the sigma quadruple.
    """
    x = np.asarray(x, dtype=float)
    ends = [EndOrbifoldParams((3, 3, 3), x[2 * k], x[2 * k + 1]) for k in range(4)]
    front = [triangle_invariants_front(e) for e in ends]
    back = [triangle_invariants_back(e) for e in ends]
    res = []
    for k, l in EDGES:
        i, j = edge_slot(k, (k, l)), edge_slot(l, (k, l))
        res.append(front[k].rho[i] - front[l].rho[j])
        res.append(back[k].rho[i] - back[l].rho[j])
    res.append(np.prod([f.sigma[0] for f in front]) - 1.0)
    return np.array(res)


@dataclass(frozen=True)
class Feasible:
    c_value: float

    feasible = True


@dataclass(frozen=True)
class Infeasible:
    reason: str

    feasible = False


def _check_orders(ends):
    if len(ends) != 4:
        raise WrongOrders("the doubled tetrahedron has four ends")
    for e in ends:
        if tuple(e.orders) != (3, 3, 3):
            raise WrongOrders(f"every end must have orders (3,3,3), got {e.orders}")


def solve_doubled_tetrahedron_constraints(ends) -> Feasible | Infeasible:
    _check_orders(ends)
    s = np.array([e.s for e in ends])
    if np.max(s) - np.min(s) > S_TOL:
        return Infeasible("s mismatch")
    c = product_constant(float(np.mean(s)))
    prod_t = float(np.prod([e.t for e in ends]))
    if abs(prod_t - c) > T_TOL * max(1.0, c):
        return Infeasible("t-product")
    return Feasible(c)


def flatten(ends) -> np.ndarray:
    return np.array([v for e in ends for v in (e.s, e.t)], dtype=float)


def jacobian_rank(fun, x, step: float = 1e-5, sv_tol: float = 1e-7) -> int:
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x))
    if f0.size == 0:
        return 0
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2 * step))
    jac = np.column_stack(cols)
    sv = np.linalg.svd(jac, compute_uv=False)
    return int(np.sum(sv > sv_tol))


def local_dimension(at, step: float = 1e-5, constraints=None) -> int:
    """Ambient dimension minus the numerical rank of the constraint Jacobian.

    ``at`` is a list of EndOrbifoldParams; the ambient space is 2 per end.
    By default the doubled-tetrahedron gluing equations are used; pass
    ``constraints=lambda x: []`` for an unconstrained space.
    """
    x = flatten(at)
    fun = constraint_residuals if constraints is None else constraints
    return x.size - jacobian_rank(fun, x, step)


def feasible_point(s: float, ts=(1.0, 1.0, 1.0)) -> list:
    """Four (3,3,3) ends with common s and t_4 chosen to satisfy the product constraint."""
    t4 = product_constant(s) / float(np.prod(ts))
    return [EndOrbifoldParams((3, 3, 3), s, t) for t in (*ts, t4)]


def reflection_end_params(cartan) -> list:
    """End parameters of the doubled reflection tetrahedron.

    s = 1 and t_k = -a_ij a_jl a_li for the facets (i, j, l) around vertex k,
    ordered so that (k, i, j, l) is an even permutation.
    """
    a = np.asarray(cartan, dtype=float)
    out = []
    for k in range(4):
        i, j, l = [w for w in range(4) if w != k]
        if _parity((k, i, j, l)):
            j, l = l, j
        out.append(EndOrbifoldParams((3, 3, 3), 1.0, float(-a[i, j] * a[j, l] * a[l, i])))
    return out


def _parity(perm) -> int:
    perm = list(perm)
    odd = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                odd ^= 1
    return odd
