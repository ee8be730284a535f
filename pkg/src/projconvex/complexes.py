"""Collections of placed simplices shared by the Coxeter orbit and the developer."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .convex import ConvexBody, _rp_chart, chart_basis, max_margin_functional
from .errors import BadChart, NotProperlyConvex


@dataclass(eq=False)
class DevelopedComplex:
    """Placed cells with their group words.

    ``cells[k]`` holds the homogeneous vertex coordinates of cell ``k`` as
    rows.  The first ``n_seeds`` cells are the base cells.  ``adjacency``
    lists facet-sharing pairs as (cell_a, cell_b, opposite_a, opposite_b);
    ``relators`` are words in the holonomy names (uppercase for inverses).
    """

    cells: np.ndarray
    words: list
    depths: list
    n_seeds: int = 1
    holonomy: dict = field(default_factory=dict)
    end_vertices: list = field(default_factory=list)
    elements: list = field(default_factory=list)
    adjacency: list = field(default_factory=list)
    relators: list = field(default_factory=list)
    kind: str = "developed"

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=float)

    def __len__(self):
        return len(self.cells)

    @property
    def ambient(self) -> int:
        return self.cells.shape[2]

    def all_vertices(self) -> np.ndarray:
        v = self.cells.reshape(-1, self.ambient)
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def unique_vertices(self, decimals: int = 8) -> np.ndarray:
        v = self.all_vertices()
        ell = self.chart()
        v = v * np.sign(v @ ell)[:, None]
        _, idx = np.unique(np.round(v, decimals) + 0.0, axis=0, return_index=True)
        return v[np.sort(idx)]

    def chart(self) -> np.ndarray:
        """Max-margin affine chart containing every vertex (up to sign)."""
        v = self.all_vertices()
        ell, margin = max_margin_functional(v)
        if margin > 1e-8:
            return ell
        return _rp_chart(v)

    def lifted_cells(self, ell=None) -> np.ndarray:
        """Cells with every vertex scaled to ell . v = 1."""
        ell = self.chart() if ell is None else np.asarray(ell, dtype=float)
        vals = np.einsum("kij,j->ki", self.cells, ell)
        if np.any(np.abs(vals) < 1e-14):
            raise BadChart("a vertex lies on the hyperplane at infinity of the chart")
        return self.cells / vals[:, :, None]

    def to_body(self) -> ConvexBody:
        """Convex hull of all placed vertices."""
        return ConvexBody.from_vertices(self.unique_vertices())

    def union_slack(self, points, ell=None) -> np.ndarray:
        """Best barycentric slack of each point over the simplicial cells.

        A point lies in the union when the returned value is >= 0.
        """
        lc = self.lifted_cells(ell)
        if lc.shape[1] != self.ambient:
            raise NotProperlyConvex("union test needs simplicial cells")
        inv = np.linalg.inv(lc.transpose(0, 2, 1))
        pts = np.atleast_2d(points)
        out = np.empty(len(pts))
        for start in range(0, len(pts), 256):
            chunk = pts[start:start + 256]
            lam = np.einsum("kij,pj->pki", inv, chunk)
            lam = lam / np.sum(lam, axis=-1, keepdims=True)
            out[start:start + 256] = lam.min(axis=-1).max(axis=-1)
        return out

    # output ---------------------------------------------------------------
    def chart_coordinates(self, ell=None):
        ell = self.chart() if ell is None else np.asarray(ell, dtype=float)
        basis = chart_basis(ell)
        lc = self.lifted_cells(ell)
        return lc @ basis.T

    def to_obj(self, ell=None) -> str:
        coords = self.chart_coordinates(ell)
        k, m, d = coords.shape
        lines = ["# projconvex developed complex", f"# cells {k}"]
        index = {}
        verts = []
        faces = []
        for c in range(k):
            ids = []
            for row in coords[c]:
                key = tuple(np.round(row, 9) + 0.0)
                if key not in index:
                    index[key] = len(verts) + 1
                    verts.append(row)
                ids.append(index[key])
            faces.append((c, ids))
        for row in verts:
            xyz = list(row) + [0.0] * (3 - len(row))
            lines.append("v " + " ".join(f"{x:.12g}" for x in xyz[:3]))
        for c, ids in faces:
            lines.append(f"o cell{c}_{self.words[c] or 'e'}")
            if m == 3:
                lines.append("f " + " ".join(map(str, ids)))
            else:
                for tri in itertools.combinations(ids, 3):
                    lines.append("f " + " ".join(map(str, tri)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "ambient": self.ambient,
            "n_seeds": self.n_seeds,
            "cells": [
                {"word": w, "depth": int(d), "vertices": c.tolist()}
                for c, w, d in zip(self.cells, self.words, self.depths)
            ],
            "holonomy": {k: np.asarray(v).tolist() for k, v in self.holonomy.items()},
            "end_vertices": [np.asarray(v).tolist() for v in self.end_vertices],
            "adjacency": [list(map(int, a)) for a in self.adjacency],
            "relators": list(self.relators),
        }

    @classmethod
    def from_json(cls, data) -> "DevelopedComplex":
        if isinstance(data, str):
            data = json.loads(data)
        cells = np.array([c["vertices"] for c in data["cells"]], dtype=float)
        return cls(
            cells,
            [c["word"] for c in data["cells"]],
            [c["depth"] for c in data["cells"]],
            n_seeds=int(data.get("n_seeds", 1)),
            holonomy={k: np.array(v) for k, v in data.get("holonomy", {}).items()},
            end_vertices=[np.array(v) for v in data.get("end_vertices", [])],
            adjacency=[tuple(a) for a in data.get("adjacency", [])],
            relators=list(data.get("relators", [])),
            kind=data.get("kind", "developed"),
        )
