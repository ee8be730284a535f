"""Projective linear algebra on RP^n and on its double cover S^n.

Points are stored as unit vectors of homogeneous coordinates.  In ``"rp"``
mode the first nonzero coordinate is made positive so that ``v`` and ``-v``
give the same point; in ``"sphere"`` mode only positive rescaling is
quotiented out.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegeneratePoints,
    DimensionMismatch,
    GeometryError,
    NotCollinear,
    OrientationMismatch,
    ZeroVector,
)

ZERO_NORM = 1e-300
COLLINEAR_TOL = 1e-9
DET_TOL = 1e-12


def _first_nonzero_sign(v, tol=0.0):
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return 1.0
    return 1.0 if v[idx[0]] > 0 else -1.0


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of RP^n (mode ``"rp"``) or S^n (mode ``"sphere"``)."""

    coords: np.ndarray
    mode: str = "rp"

    def __post_init__(self):
        v = np.array(self.coords, dtype=float).reshape(-1)
        if self.mode not in ("rp", "sphere"):
            raise ValueError(f"unknown mode {self.mode!r}")
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or nrm < ZERO_NORM:
            raise ZeroVector("homogeneous coordinates must be nonzero")
        # leave unit vectors untouched so normalization is idempotent bit for bit
        if abs(nrm - 1.0) > 4 * np.finfo(float).eps:
            v = v / nrm
        if self.mode == "rp":
            v = v * _first_nonzero_sign(v)
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def same_as(self, other: "ProjPoint", tol: float = 1e-10) -> bool:
        """Projective equality (up to sign in rp mode, positive scale on the sphere)."""
        if other.dim != self.dim:
            return False
        dot = float(self.coords @ other.coords)
        if self.mode == "rp" or other.mode == "rp":
            dot = abs(dot)
        return dot > 1.0 - tol

    def __repr__(self):
        return f"ProjPoint({np.array2string(self.coords, precision=6)}, mode={self.mode!r})"


@dataclass(frozen=True, eq=False)
class ProjMap:
    """A projective transformation given by an invertible matrix.

    ``mode="sl_pm"`` asserts that the matrix is the chosen lift with
    determinant +1 or -1.
    """

    matrix: np.ndarray
    mode: str = "pgl"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("projective map must be a square matrix")
        det = np.linalg.det(m)
        if not np.isfinite(det) or abs(det) < 1e-300:
            raise GeometryError("projective map must be invertible")
        if self.mode == "sl_pm" and abs(abs(det) - 1.0) > DET_TOL * max(1.0, np.abs(m).max() ** m.shape[0]):
            raise GeometryError(f"sl_pm matrix must have det +-1, got {det}")
        if self.mode not in ("pgl", "sl_pm"):
            raise ValueError(f"unknown mode {self.mode!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        mode = "sl_pm" if self.mode == other.mode == "sl_pm" else "pgl"
        return ProjMap(self.matrix @ other.matrix, mode)

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.matrix), self.mode)

    def proportional_to(self, other: "ProjMap", tol: float = 1e-10) -> bool:
        return matrices_proportional(self.matrix, other.matrix, tol)


@dataclass(frozen=True, eq=False)
class ProjLine:
    """Projective line spanned by two distinct points."""

    a: ProjPoint
    b: ProjPoint
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.a.dim != self.b.dim:
            raise DimensionMismatch("line endpoints live in different dimensions")
        stacked = np.vstack([self.a.coords, self.b.coords])
        _, s, vt = np.linalg.svd(stacked)
        if s[1] < COLLINEAR_TOL:
            raise DegeneratePoints("line needs two distinct points")
        # orthonormal basis (a, w) of the 2-plane, with a first
        a = self.a.coords
        w = self.b.coords - (self.b.coords @ a) * a
        w = w / np.linalg.norm(w)
        basis = np.vstack([a, w])
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.a.dim

    def point(self, theta: float) -> np.ndarray:
        """Unit vector at angle ``theta`` on the great circle from ``a`` toward ``b``."""
        return np.cos(theta) * self.basis[0] + np.sin(theta) * self.basis[1]


def normalize(v, mode: str = "rp") -> ProjPoint:
    return ProjPoint(np.asarray(v, dtype=float), mode)


def apply(g: ProjMap, p: ProjPoint) -> ProjPoint:
    if g.dim != p.dim:
        raise DimensionMismatch(f"map acts on RP^{g.dim}, point lives in RP^{p.dim}")
    image = g.matrix @ p.coords
    # invertible matrices never send a unit vector to zero
    assert np.linalg.norm(image) > ZERO_NORM
    return ProjPoint(image, p.mode)


def bracket(x, y) -> float:
    """Determinant of two homogeneous line coordinates."""
    return float(x[0] * y[1] - x[1] * y[0])


def cross_ratio_line(coords) -> float:
    """Cross-ratio of four points given by 2-dim homogeneous line coordinates.

    Equals (t_c - t_a)(t_d - t_b) / ((t_d - t_a)(t_c - t_b)) in any affine
    chart t of the line.
    """
    a, b, c, d = (np.asarray(x, dtype=float) for x in coords)
    den = bracket(a, d) * bracket(b, c)
    if den == 0.0:
        raise DegeneratePoints("cross-ratio denominator vanishes")
    return bracket(a, c) * bracket(b, d) / den


def line_coordinates(points) -> np.ndarray:
    """Coordinates of collinear points with respect to an orthonormal basis of their span.

    Raises NotCollinear when the points span more than a 2-plane.
    """
    m = np.vstack([np.asarray(p.coords if isinstance(p, ProjPoint) else p, dtype=float) for p in points])
    m = m / np.linalg.norm(m, axis=1, keepdims=True)
    _, s, vt = np.linalg.svd(m)
    if s.size > 2 and s[2] > COLLINEAR_TOL:
        raise NotCollinear(f"points span more than a line (third singular value {s[2]:.3e})")
    return m @ vt[:2].T


def cross_ratio(a: ProjPoint, b: ProjPoint, c: ProjPoint, d: ProjPoint) -> float:
    """Cross-ratio (a, b, c, d) of four distinct collinear points."""
    pts = [a, b, c, d]
    if len({p.dim for p in pts}) != 1:
        raise DimensionMismatch("cross-ratio points must share a dimension")
    lc = line_coordinates(pts)
    lc = lc / np.linalg.norm(lc, axis=1, keepdims=True)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(bracket(lc[i], lc[j])) < COLLINEAR_TOL:
                raise DegeneratePoints(f"points {i} and {j} coincide projectively")
    return cross_ratio_line(lc)


def matrices_proportional(m1, m2, tol: float = 1e-10) -> bool:
    a = np.asarray(m1, dtype=float).ravel()
    b = np.asarray(m2, dtype=float).ravel()
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return min(np.abs(a - b).max(), np.abs(a + b).max()) <= tol


def unit_det(m) -> np.ndarray:
    """Rescale by a positive scalar so that |det| = 1 (keeps the sign of every entry)."""
    m = np.asarray(m, dtype=float)
    det = np.linalg.det(m)
    if det == 0 or not np.isfinite(det):
        raise GeometryError("matrix is singular")
    return m / abs(det) ** (1.0 / m.shape[0])


def lift_to_slpm(g: ProjMap, orientation_reversing: bool = False) -> ProjMap:
    """Lift a projective map to SL_pm(n+1, R) with the requested determinant sign.

    For even n the lift is unique.  For odd n both signs have the same
    determinant; the one whose first column has a positive first nonzero
    entry is returned.
    """
    m = unit_det(g.matrix)
    want = -1.0 if orientation_reversing else 1.0
    det_sign = np.sign(np.linalg.det(m))
    size = m.shape[0]
    if size % 2 == 1:
        if det_sign != want:
            m = -m
    else:
        if det_sign != want:
            raise OrientationMismatch(
                f"det sign {det_sign:+.0f} of a {size}x{size} matrix cannot be changed by -1"
            )
        m = m * _first_nonzero_sign(m[:, 0], tol=1e-14)
    return ProjMap(m, "sl_pm")


def random_projmap(dim: int, rng: np.random.Generator, spread: float = 0.5) -> ProjMap:
    """A random well-conditioned projective map of RP^dim near the identity."""
    while True:
        m = np.eye(dim + 1) + spread * rng.normal(size=(dim + 1, dim + 1))
        if np.linalg.cond(m) < 50:
            return ProjMap(m)
