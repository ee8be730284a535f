import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from projconvex.errors import InvalidOrder, NonpositiveParameter, WrongOrders
from projconvex.invariants import (
    EndOrbifoldParams,
    Feasible,
    Infeasible,
    constraint_residuals,
    edge_slot,
    feasible_point,
    flatten,
    local_dimension,
    product_constant,
    reflection_end_params,
    solve_doubled_tetrahedron_constraints,
    tau,
    triangle_invariants_back,
    triangle_invariants_front,
)


def test_tau_values():
    assert tau(3) == pytest.approx(-1.0)
    assert tau(2) == pytest.approx(-2.0)
    assert tau(4) == pytest.approx(0.0, abs=1e-15)
    for bad in (1, 0, 2.5):
        with pytest.raises(InvalidOrder):
            tau(bad)


def test_param_validation():
    with pytest.raises(NonpositiveParameter):
        EndOrbifoldParams(s=0.0)
    with pytest.raises(NonpositiveParameter):
        EndOrbifoldParams(t=-1.0)
    with pytest.raises(InvalidOrder):
        EndOrbifoldParams(orders=(3, 1, 3))


def test_front_examples():
    f = triangle_invariants_front(EndOrbifoldParams())
    np.testing.assert_allclose(f.rho + f.sigma, (1, 1, 1, 1, 1))
    f = triangle_invariants_front(EndOrbifoldParams(s=2.0))
    np.testing.assert_allclose(f.rho + f.sigma, (3, 3, 3, 3, 9))


def test_back_examples():
    b = triangle_invariants_back(EndOrbifoldParams(s=2.0))
    np.testing.assert_allclose(b.rho + b.sigma, (0.75, 0.75, 0.75, 3 / 8, 9 / 8))
    assert b.relation_residual() <= 1e-15


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.05, 20.0),
    st.floats(0.05, 20.0),
    st.tuples(*[st.integers(2, 12)] * 3),
)
def test_identity_both_families(s, t, orders):
    p = EndOrbifoldParams(orders, s, t)
    for inv in (triangle_invariants_front(p), triangle_invariants_back(p)):
        scale = max(1.0, abs(np.prod(inv.rho)))
        assert inv.relation_residual() <= 1e-10 * scale


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20.0), st.tuples(*[st.integers(2, 12)] * 3))
def test_front_equals_back_at_s1(t, orders):
    p = EndOrbifoldParams(orders, 1.0, t)
    assert triangle_invariants_front(p) == triangle_invariants_back(p)


def test_edge_slot():
    assert edge_slot(0, (0, 1)) == 0
    assert edge_slot(0, (0, 3)) == 2
    assert edge_slot(3, (0, 3)) == 0
    assert edge_slot(2, (1, 2)) == 1


def _oracle_t4(s, ts):
    """Solve the gluing equations for t4 numerically."""
    def g(t4):
        x = flatten([EndOrbifoldParams((3, 3, 3), s, t) for t in (*ts, t4)])
        return constraint_residuals(x)[-1]
    return brentq(g, 1e-8, 1e8, xtol=1e-14, rtol=1e-14)


@pytest.mark.parametrize("s", [0.3, 0.7, 1.0, 1.5, 3.0])
def test_product_constant_matches_gluing_oracle(s):
    ts = (0.8, 1.3, 2.1)
    t4 = _oracle_t4(s, ts)
    assert np.prod(ts) * t4 == pytest.approx(product_constant(s), rel=1e-10)
    assert np.max(np.abs(constraint_residuals(flatten(feasible_point(s, ts))))) <= 1e-12


def test_product_constant_at_one():
    assert product_constant(1.0) == 1.0


def test_solver_examples():
    ends = feasible_point(1.0, (0.5, 2.0, 1.5))
    v = solve_doubled_tetrahedron_constraints(ends)
    assert isinstance(v, Feasible) and v.c_value == pytest.approx(1.0)
    bad_s = ends[:3] + [EndOrbifoldParams((3, 3, 3), 2.0, ends[3].t)]
    assert solve_doubled_tetrahedron_constraints(bad_s) == Infeasible("s mismatch")
    bad_t = ends[:3] + [EndOrbifoldParams((3, 3, 3), 1.0, ends[3].t * 1.5)]
    assert solve_doubled_tetrahedron_constraints(bad_t) == Infeasible("t-product")


def test_solver_permutation_invariant():
    ends = feasible_point(1.4, (0.5, 2.0, 1.5))
    for perm in itertools.permutations(range(4)):
        assert solve_doubled_tetrahedron_constraints([ends[i] for i in perm]).feasible


def test_wrong_orders():
    ends = feasible_point(1.0)
    with pytest.raises(WrongOrders):
        solve_doubled_tetrahedron_constraints(ends[:3])
    with pytest.raises(WrongOrders):
        solve_doubled_tetrahedron_constraints(ends[:3] + [EndOrbifoldParams((2, 3, 3), 1.0, 1.0)])


@pytest.mark.parametrize("s,ts", [(1.0, (1.0, 1.0, 1.0)), (1.3, (0.7, 1.9, 1.1)), (0.6, (2.0, 0.4, 1.2))])
def test_local_dimension(s, ts):
    pt = feasible_point(s, ts)
    assert local_dimension(pt) == 4
    assert local_dimension(pt, step=1e-6) == 4
    assert local_dimension(pt, step=5e-6) == 4


def test_local_dimension_unconstrained():
    assert local_dimension([EndOrbifoldParams()], constraints=lambda x: []) == 2


def test_reflection_end_params_hyperbolic():
    a = 3 * np.eye(4) - np.ones((4, 4))
    ends = reflection_end_params(a)
    assert all(e.s == 1.0 and e.t == pytest.approx(1.0) for e in ends)
    assert solve_doubled_tetrahedron_constraints(ends).feasible
