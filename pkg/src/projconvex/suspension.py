"""Affine suspension of a projective structure.

A point p of S^n and a radius t > 0 correspond to the vector t * p_hat of
R^{n+1} - {0}.  Deck transformations act through their SL_pm lifts and the
dilation S_s multiplies the radius.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, NonpositiveParameter, NotRadiant, UnknownGenerator
from .projcore import ProjMap, ProjPoint, lift_to_slpm

DET_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SuspensionCtx:
    base_dim: int
    holonomy_lift: dict
    dilation_factor: float = 2.0
    translations: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dilation_factor <= 1.0:
            raise NonpositiveParameter("dilation factor must exceed 1")
        for name, g in self.holonomy_lift.items():
            m = g.matrix if isinstance(g, ProjMap) else np.asarray(g, dtype=float)
            if m.shape != (self.base_dim + 1, self.base_dim + 1):
                raise GeometryError(f"generator {name!r} has shape {m.shape}")
            if abs(abs(np.linalg.det(m)) - 1.0) > DET_TOL:
                raise GeometryError(f"generator {name!r} is not in SL_pm")

    @classmethod
    def from_projective(cls, generators: dict, dilation_factor: float = 2.0,
                        orientation_reversing=None) -> "SuspensionCtx":
        """Lift projective generators to SL_pm and suspend them.

        ``orientation_reversing`` names the generators lifted with det -1;
        by default this follows the sign of each matrix determinant.
        """
        lifts = {}
        for name, g in generators.items():
            pm = g if isinstance(g, ProjMap) else ProjMap(g)
            if orientation_reversing is None:
                flip = np.linalg.det(pm.matrix) < 0
            else:
                flip = name in orientation_reversing
            lifts[name] = lift_to_slpm(pm, flip)
        dim = next(iter(lifts.values())).dim
        return cls(dim, lifts, dilation_factor)

    def matrix(self, name: str) -> np.ndarray:
        if name not in self.holonomy_lift:
            raise UnknownGenerator(f"unknown generator {name!r}")
        g = self.holonomy_lift[name]
        return g.matrix if isinstance(g, ProjMap) else np.asarray(g, dtype=float)

    def word_matrix(self, word) -> np.ndarray:
        """Product of lifted generators; a word is a name or a sequence of names.

        The rightmost letter acts first.
        """
        if isinstance(word, str) and word in self.holonomy_lift:
            return self.matrix(word)
        m = np.eye(self.base_dim + 1)
        for name in word:
            m = m @ self.matrix(name)
        return m


def _unit(p):
    x = np.asarray(getattr(p, "coords", p), dtype=float)
    return x / np.linalg.norm(x)


def suspend_point(ctx: SuspensionCtx, p, t: float) -> np.ndarray:
    if t <= 0:
        raise NonpositiveParameter("radius must be positive")
    return t * _unit(p)


def desuspend(v) -> tuple:
    """Radial projection back to (point of S^n, radius)."""
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    return ProjPoint(v, "sphere"), r


def suspend_deck(ctx: SuspensionCtx, g_name, p, t: float) -> tuple:
    """Suspended action (p, t) -> (g p, |M (t p_hat)|)."""
    if t <= 0:
        raise NonpositiveParameter("radius must be positive")
    m = ctx.word_matrix(g_name)
    y = m @ (t * _unit(p))
    return ProjPoint(y, "sphere"), float(np.linalg.norm(y))


def dilate(ctx: SuspensionCtx, p, t: float, power: int = 1) -> tuple:
    """The dilation S_s^power: (p, t) -> (p, s^power t)."""
    if t <= 0:
        raise NonpositiveParameter("radius must be positive")
    return ProjPoint(_unit(p), "sphere"), float(t * ctx.dilation_factor ** power)


def is_radiant_fixed_point(ctx: SuspensionCtx) -> np.ndarray:
    """Return the origin after checking every suspended generator fixes it.

    Generators may carry a translation part in ``ctx.translations``; any
    nonzero translation breaks the common fixed point.
    """
    origin = np.zeros(ctx.base_dim + 1)
    for name in ctx.holonomy_lift:
        m = ctx.matrix(name)
        b = np.asarray(ctx.translations.get(name, origin), dtype=float)
        image = m @ origin + b
        if np.linalg.norm(image) > 1e-12:
            raise NotRadiant(f"generator {name!r} moves the origin to {image}")
    return origin
