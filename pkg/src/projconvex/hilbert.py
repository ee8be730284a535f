"""Hilbert metric of a properly convex domain.

Distances are computed on the great circle through the two points: the
chord endpoints are located by bisection on the circle angle and the
cross-ratio is evaluated from the four angles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex import ConvexBody, Verdict, max_margin_functional, properly_convex_check
from .errors import DegenerateChord, LineMissesDomain, NotProperlyConvex, PointOutsideDomain
from .projcore import ProjLine, ProjPoint

BISECT_ITERS = 200
BISECT_TOL = 1e-15
INTERIOR_TOL = 1e-9
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class HilbertSpaceCtx:
    body: ConvexBody
    patch: np.ndarray

    @classmethod
    def from_body(cls, body: ConvexBody, check: bool = True) -> "HilbertSpaceCtx":
        if check and properly_convex_check(body) is not Verdict.PROPERLY_CONVEX:
            raise NotProperlyConvex("Hilbert metric needs a properly convex body")
        ell, _ = max_margin_functional(body.samples)
        return cls(body, ell)

    def lift(self, p) -> np.ndarray:
        x = np.asarray(getattr(p, "coords", p), dtype=float)
        x = x / np.linalg.norm(x)
        if self.body.margin(x) > INTERIOR_TOL:
            return x
        if self.body.margin(-x) > INTERIOR_TOL:
            return -x
        raise PointOutsideDomain("point is not strictly inside the domain")

    def chart(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x / (x @ self.patch)


def _circle(a, b):
    """Orthonormal pair (a, w) and the angle of b on the circle through a and b."""
    w = b - (b @ a) * a
    nw = np.linalg.norm(w)
    if nw < 1e-300:
        return a, None, 0.0
    w = w / nw
    return a, w, float(np.arctan2(b @ w, b @ a))


def _exit_angle(body, a, w, inside, outside):
    """Bisection for the boundary crossing between two circle angles."""
    def point(t):
        return np.cos(t) * a + np.sin(t) * w

    if body.margin(point(inside)) <= 0:
        raise DegenerateChord("bisection start is not inside the body")
    if body.margin(point(outside)) > 0:
        raise DegenerateChord("chord does not leave the body")
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (inside + outside)
        if body.margin(point(mid)) > 0:
            inside = mid
        else:
            outside = mid
        if abs(outside - inside) < BISECT_TOL:
            break
    return 0.5 * (inside + outside)


def _cross_ratio_angles(ta, tb, tc, td):
    """(a, b, c, d) for points at circle angles, via the bracket sin(t_j - t_i)."""
    return np.sin(tc - ta) * np.sin(td - tb) / (np.sin(td - ta) * np.sin(tc - tb))


def chord_endpoints(ctx: HilbertSpaceCtx, p, q):
    """Angles (theta_o, theta_s) of the chord endpoints on the circle from p toward q.

    ``o`` lies beyond ``p`` and ``s`` lies beyond ``q``; ``p`` sits at angle 0.
    Also returns the frame and the angle of ``q``.
    """
    a = ctx.lift(p)
    b = ctx.lift(q)
    a, w, tq = _circle(a, b)
    if w is None:
        raise DegenerateChord("points coincide")
    ts = _exit_angle(ctx.body, a, w, tq, np.pi)
    to = _exit_angle(ctx.body, a, w, 0.0, ts - np.pi)
    return to, ts, tq, a, w


def hilbert_distance(ctx: HilbertSpaceCtx, p, q) -> float:
    """d(p, q) = log (o, s, q, p) for the chord [o, s] through p and q."""
    a = ctx.lift(p)
    b = ctx.lift(q)
    if np.linalg.norm(a - b) < 1e-15:
        return 0.0
    to, ts, tq, _, _ = chord_endpoints(ctx, a, b)
    cr = _cross_ratio_angles(to, ts, tq, 0.0)
    return float(max(0.0, np.log(cr)))


def _line_interior_interval(ctx, line: ProjLine, n_probe: int = 721):
    """An interval of circle angles along ``line`` lying inside the domain."""
    a, w = line.basis
    ts = np.linspace(0.0, np.pi, n_probe, endpoint=False)
    pts = np.cos(ts)[:, None] * a + np.sin(ts)[:, None] * w
    marg = np.maximum(ctx.body.margins(pts), ctx.body.margins(-pts))
    idx = np.flatnonzero(marg > INTERIOR_TOL)
    if idx.size == 0:
        raise LineMissesDomain("line does not meet the interior of the domain")
    t0 = ts[idx[np.argmax(marg[idx])]]
    x0 = ctx.lift(np.cos(t0) * a + np.sin(t0) * w)
    # orient the circle so that x0 sits at angle 0 on the positive nappe
    w2 = w - (w @ x0) * x0
    w2 = w2 / np.linalg.norm(w2)
    hi = _exit_angle(ctx.body, x0, w2, 0.0, np.pi)
    lo = _exit_angle(ctx.body, x0, w2, 0.0, hi - np.pi)
    return x0, w2, lo, hi


def foot_of_perpendicular(ctx: HilbertSpaceCtx, x, line: ProjLine, tol: float = 1e-10) -> ProjPoint:
    """Point of ``line`` nearest to ``x`` in the Hilbert metric.

    The distance is convex along the chord, so a golden-section search over
    the circle angle converges; when the minimizers form a segment its
    midpoint is returned.
    """
    xv = ctx.lift(x)
    x0, w, lo, hi = _line_interior_interval(ctx, line)

    def f(t):
        y = np.cos(t) * x0 + np.sin(t) * w
        try:
            return hilbert_distance(ctx, xv, y)
        except PointOutsideDomain:
            # padded chord ends can fall within the interior tolerance of the boundary
            return np.inf

    pad = 1e-9 * (hi - lo)
    a, b = lo + pad, hi - pad
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    tmin = 0.5 * (a + b)
    fmin = f(tmin)
    # widen to the full interval of near-minimizers (flat faces of nonstrict bodies)
    tl, tr = _flat_extent(f, tmin, fmin, lo, hi)
    t = 0.5 * (tl + tr)
    return ProjPoint(np.cos(t) * x0 + np.sin(t) * w, "sphere")


def _flat_extent(f, t0, f0, lo, hi, tol=1e-8):
    def edge(outer):
        inner = t0
        if f(outer) <= f0 + tol:
            return outer
        for _ in range(80):
            mid = 0.5 * (inner + outer)
            if f(mid) <= f0 + tol:
                inner = mid
            else:
                outer = mid
        return inner

    pad = 1e-9 * (hi - lo)
    return edge(lo + pad), edge(hi - pad)


def klein_distance(p, q) -> float:
    """Hyperbolic distance between points of the open unit ball (Klein model)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    num = 1.0 - p @ q
    den = np.sqrt((1.0 - p @ p) * (1.0 - q @ q))
    return float(np.arccosh(max(1.0, num / den)))
