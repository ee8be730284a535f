"""Koszul-Vinberg characteristic function of a properly convex cone.

    f(x) = integral over V* of exp(-phi(x)) dphi

Rays of V* are parametrized by the bounded section S = {psi in clo(V*) :
psi(x0) = 1}.  Writing phi = t psi, the radial integral is exact and

    f(x) = n! / |x0| * integral over S of psi(x)^-(n+1) dsigma(psi)

with n + 1 the ambient dimension.  The section integral is a Monte-Carlo
mean over uniform samples of S.  The sample set is fixed by the seed, so
every evaluation inside one context uses common random numbers: f is then
exactly homogeneous and its finite-difference Hessian is smooth.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from .convex import ConvexBody, Cone, chart_basis, dual_cone, hausdorff_distance
from .errors import DualUnbounded, OutsideCone

DEFAULT_SAMPLES = 1_000_000
CHUNK = 1 << 16


def thread_count() -> int:
    env = os.environ.get("PROJCONVEX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _simplex_volumes(simplices):
    """Volumes of k-simplices given as (m, k+1, k) vertex arrays."""
    edges = simplices[:, 1:, :] - simplices[:, :1, :]
    k = edges.shape[1]
    return np.abs(np.linalg.det(edges)) / math.factorial(k)


@dataclass(eq=False)
class KvContext:
    """Cone with cached dual and a fixed Monte-Carlo sample of the dual section."""

    cone: Cone
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    x0: np.ndarray | None = None
    dual: Cone = field(init=False)
    _psi: np.ndarray | None = field(init=False, default=None, repr=False)
    _volume: float = field(init=False, default=0.0, repr=False)

    def __post_init__(self):
        self.dual = dual_cone(self.cone)
        if self.x0 is None:
            self.x0 = self.cone.interior_point()
        self.x0 = np.asarray(self.x0, dtype=float)
        if not self.cone.contains(self.x0, margin=1e-12):
            raise DualUnbounded("section normal must lie in the interior of the cone")

    @property
    def dim(self) -> int:
        return self.cone.dim_ambient

    def section_vertices(self) -> np.ndarray:
        """Extreme rays of V* scaled to psi(x0) = 1."""
        g = self.dual.ensure_generators()
        vals = g @ self.x0
        if np.any(vals <= 0):
            raise DualUnbounded("cross-section of the dual cone is unbounded")
        return g / vals[:, None]

    def _prepare(self):
        if self._psi is not None:
            return
        verts = self.section_vertices()
        n1 = self.dim
        unit = self.x0 / np.linalg.norm(self.x0)
        basis = chart_basis(unit)
        # coordinates inside the section hyperplane
        y = verts @ basis.T
        if len(verts) == n1:
            cells = np.arange(n1)[None, :]
        elif n1 == 2:
            order = np.argsort(y[:, 0])
            cells = np.array([[order[0], order[-1]]])
        else:
            cells = Delaunay(y).simplices
        vols = _simplex_volumes(y[cells])
        keep = vols > 1e-15 * vols.max()
        cells, vols = cells[keep], vols[keep]
        self._volume = float(vols.sum())
        ss = np.random.SeedSequence(self.seed)
        n_chunks = max(1, -(-self.n_samples // CHUNK))
        children = ss.spawn(n_chunks)
        sizes = [CHUNK] * (n_chunks - 1) + [self.n_samples - CHUNK * (n_chunks - 1)]
        probs = vols / vols.sum()

        def draw(args):
            child, size = args
            rng = np.random.default_rng(child)
            w = rng.dirichlet(np.ones(n1), size=size)
            which = rng.choice(len(cells), size=size, p=probs) if len(cells) > 1 else np.zeros(size, dtype=int)
            v = verts[cells[which]]
            return np.einsum("ki,kij->kj", w, v)

        with ThreadPoolExecutor(max_workers=thread_count()) as ex:
            parts = list(ex.map(draw, zip(children, sizes)))
        self._psi = np.vstack(parts)

    def samples(self) -> np.ndarray:
        self._prepare()
        return self._psi

    def prefactor(self) -> float:
        self._prepare()
        n = self.dim - 1
        return math.factorial(n) / np.linalg.norm(self.x0) * self._volume


def _kv_many(ctx: KvContext, xs) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    psi = ctx.samples()
    n1 = ctx.dim
    acc = np.zeros(len(xs))
    # fixed chunk order keeps the reduction deterministic
    for start in range(0, len(psi), CHUNK):
        vals = psi[start:start + CHUNK] @ xs.T
        acc += np.sum(vals ** (-n1), axis=0)
    return ctx.prefactor() * acc / len(psi)


def _check_inside(ctx, x):
    h = ctx.cone.ensure_halfspaces()
    if np.min(h @ x) <= 0:
        raise OutsideCone(f"point {x} is not inside the cone")


def kv_value(ctx: KvContext, x) -> float:
    x = np.asarray(x, dtype=float)
    _check_inside(ctx, x)
    return float(_kv_many(ctx, x)[0])


def _stencil(x, h):
    n = x.size
    e = np.eye(n) * h
    pts = [x]
    for i in range(n):
        pts += [x + e[i], x - e[i]]
    for i in range(n):
        for j in range(i + 1, n):
            pts += [x + e[i] + e[j], x + e[i] - e[j], x - e[i] + e[j], x - e[i] - e[j]]
    return np.array(pts)


def kv_log_hessian(ctx: KvContext, x) -> np.ndarray:
    """Central finite-difference Hessian of log f with step 1e-3 |x|."""
    x = np.asarray(x, dtype=float)
    _check_inside(ctx, x)
    n = x.size
    h = 1e-3 * np.linalg.norm(x)
    pts = _stencil(x, h)
    for p in pts:
        _check_inside(ctx, p)
    g = np.log(_kv_many(ctx, pts))
    f0 = g[0]
    hess = np.zeros((n, n))
    for i in range(n):
        hess[i, i] = (g[1 + 2 * i] - 2 * f0 + g[2 + 2 * i]) / h ** 2
    k = 1 + 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            pp, pm, mp, mm = g[k:k + 4]
            hess[i, j] = hess[j, i] = (pp - pm - mp + mm) / (4 * h ** 2)
            k += 4
    return 0.5 * (hess + hess.T)


@dataclass
class PositivityReport:
    min_eigenvalues: list
    all_positive: bool


def hessian_positivity_check(ctx: KvContext, xs) -> PositivityReport:
    mins = [float(np.linalg.eigvalsh(kv_log_hessian(ctx, x))[0]) for x in xs]
    return PositivityReport(mins, all(m > 0 for m in mins))


@dataclass
class PerturbationReport:
    c0_delta: float
    c1_delta: float
    hausdorff: float

    @property
    def delta(self) -> float:
        return max(self.c0_delta, self.c1_delta)


def _fd_gradients(ctx, pts, h):
    n = pts.shape[1]
    out = np.zeros_like(pts)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        out[:, i] = (_kv_many(ctx, pts + e) - _kv_many(ctx, pts - e)) / (2 * h)
    return out


def kv_perturbation_delta(ctx1: KvContext, ctx2: KvContext, x, radius: float = 1e-2,
                          n_points: int = 16, seed: int = 0) -> PerturbationReport:
    """C0 and C1 differences of two KV functions on a small ball around ``x``.

    The Hausdorff distance between the projectivized cones is reported
    alongside so that trends in both can be compared.
    """
    x = np.asarray(x, dtype=float)
    _check_inside(ctx1, x)
    _check_inside(ctx2, x)
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n_points, x.size))
    d *= (radius * np.linalg.norm(x) * rng.random(n_points) ** (1 / x.size) / np.linalg.norm(d, axis=1))[:, None]
    pts = np.vstack([x, x + d])
    for p in pts:
        _check_inside(ctx1, p)
        _check_inside(ctx2, p)
    c0 = float(np.max(np.abs(_kv_many(ctx1, pts) - _kv_many(ctx2, pts))))
    h = 1e-4 * np.linalg.norm(x)
    c1 = float(np.max(np.abs(_fd_gradients(ctx1, pts, h) - _fd_gradients(ctx2, pts, h))))
    haus = hausdorff_distance(ctx1.cone.to_body(), ctx2.cone.to_body())
    return PerturbationReport(c0, c1, haus)


def rotated_orthant(dim_ambient: int, angle: float) -> Cone:
    """Orthant with its first generator rotated toward the second by ``angle``."""
    g = np.eye(dim_ambient)
    g[0] = np.cos(angle) * g[0] + np.sin(angle) * np.eye(dim_ambient)[1]
    return Cone(dim_ambient, generators=g)
