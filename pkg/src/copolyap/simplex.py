"""Simplicial partitions of the standard simplex {x >= 0 : sum x = 1} and
longest-edge bisection refinement.

A cell of a partition of the standard simplex in R^n carries n vertices (the
simplex itself is (n-1)-dimensional).  Refinement bisects longest edges until
the maximum cell diameter has halved, so the nominal mesh parameter 2**-level
halves with every refinement round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ON_SIMPLEX_TOL = 1e-12


class DegenerateSimplex(ValueError):
    pass


@dataclass(frozen=True)
class Simplex:
    """Convex hull of ``vertices`` (rows); immutable."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        if v.ndim != 2:
            raise ValueError("vertices must be a 2-d array (p, ambient)")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def edges(self):
        p = self.num_vertices
        for i in range(p):
            for j in range(i + 1, p):
                yield i, j

    def diameter(self) -> float:
        best = 0.0
        for i, j in self.edges():
            best = max(best, float(np.linalg.norm(self.vertices[i] - self.vertices[j])))
        return best

    def longest_edge(self) -> tuple[int, int]:
        """Longest edge; ties (within 1e-12 relative) go to the lowest (i, j)."""
        best_len = -1.0
        best = (0, 1)
        for i, j in self.edges():
            length = float(np.linalg.norm(self.vertices[i] - self.vertices[j]))
            if length > best_len + max(1e-12 * best_len, 1e-15):
                best_len = length
                best = (i, j)
        return best

    def bisect(self) -> tuple["Simplex", "Simplex"]:
        """Split at the midpoint of the longest edge.

        The midpoint replaces one endpoint in each child, preserving vertex
        positions otherwise.
        """
        if self.num_vertices < 2:
            raise DegenerateSimplex("cannot bisect a point")
        i, j = self.longest_edge()
        mid = 0.5 * (self.vertices[i] + self.vertices[j])
        first = np.array(self.vertices)
        first[j] = mid
        second = np.array(self.vertices)
        second[i] = mid
        return Simplex(first), Simplex(second)

    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def barycentric_coordinates(self, x) -> np.ndarray:
        """Coordinates w.r.t. the vertices; requires square vertex matrix."""
        x = np.asarray(x, dtype=float)
        if self.num_vertices != self.ambient_dim:
            raise ValueError("barycentric solve needs num_vertices == ambient_dim")
        return np.linalg.solve(self.vertices.T, x)

    def contains(self, x, tol: float = 1e-10) -> bool:
        try:
            lam = self.barycentric_coordinates(x)
        except np.linalg.LinAlgError:
            return False
        return bool(np.all(lam >= -tol))

    def volume(self) -> float:
        """Relative (p-1)-dimensional volume of the vertex hull."""
        e = (self.vertices[1:] - self.vertices[0]).T
        if e.shape[1] == 0:
            return 1.0
        gram = e.T @ e
        det = np.linalg.det(gram)
        return math.sqrt(max(det, 0.0)) / math.factorial(e.shape[1])


def standard_simplex(n: int) -> Simplex:
    """Unit-coordinate-vertex simplex {x >= 0 : sum x = 1} in R^n; needs n >= 2."""
    if n < 2:
        raise ValueError("standard simplex needs n >= 2")
    return Simplex(np.eye(n))


@dataclass(frozen=True)
class SimplicialPartition:
    """Cells with disjoint interiors covering a simplex, plus refinement depth."""

    simplices: tuple[Simplex, ...]
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "simplices", tuple(self.simplices))

    @property
    def nominal_delta(self) -> float:
        return 2.0 ** (-self.level)

    def diameter(self) -> float:
        if not self.simplices:
            raise ValueError("empty partition has no diameter")
        return max(s.diameter() for s in self.simplices)

    def total_volume(self) -> float:
        return sum(s.volume() for s in self.simplices)

    def vertex_array(self) -> np.ndarray:
        """Unique vertices over all cells, deduplicated, deterministic order."""
        seen = {}
        for s in self.simplices:
            for v in s.vertices:
                key = tuple(np.round(v, 12))
                if key not in seen:
                    seen[key] = v
        return np.array(list(seen.values()))

    def refine_all(self) -> "SimplicialPartition":
        """Bisect every cell until all diameters have halved; level increments."""
        target = self.diameter() / 2.0
        out: list[Simplex] = []
        for s in self.simplices:
            if s.num_vertices < 2:
                out.append(s)
                continue
            stack = [s]
            while stack:
                t = stack.pop()
                if t.diameter() <= target * (1 + 1e-12):
                    out.append(t)
                else:
                    stack.extend(t.bisect())
        return SimplicialPartition(tuple(out), level=self.level + 1)


def standard_partition(n: int, level: int = 0) -> SimplicialPartition:
    """Partition of the standard simplex refined ``level`` times.

    For n == 1 the simplex degenerates to the single point {1}; the partition
    is that point at every level.
    """
    if n == 1:
        return SimplicialPartition((Simplex(np.array([[1.0]])),), level=level)
    part = SimplicialPartition((standard_simplex(n),), level=0)
    for _ in range(level):
        part = part.refine_all()
    return part


def boundary_partition(partition: SimplicialPartition, i: int) -> SimplicialPartition:
    """Partition induced on the face x_i = 0, with coordinate i dropped.

    Collects the facets of cells whose vertices all lie on the face; each such
    facet belongs to exactly one cell because interiors are disjoint.
    """
    cells = []
    for s in partition.simplices:
        on_face = np.abs(s.vertices[:, i]) <= ON_SIMPLEX_TOL
        if on_face.sum() == s.num_vertices - 1:
            facet = s.vertices[on_face]
            facet = np.delete(facet, i, axis=1)
            cells.append(Simplex(facet))
    return SimplicialPartition(tuple(cells), level=partition.level)
