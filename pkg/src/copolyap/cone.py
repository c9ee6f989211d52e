"""Geometry of the admissible cone: the nonnegative orthant, its faces and
Euclidean projection.  Only the orthant is supported; general polyhedral
cones are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ACTIVITY_TOL = 1e-9


class NotInCone(ValueError):
    pass


@dataclass(frozen=True)
class FaceDescriptor:
    """Active coordinate set of a point of the orthant (0-based indices)."""

    active: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "active", frozenset(int(i) for i in self.active))

    @property
    def is_interior(self) -> bool:
        return not self.active


@dataclass(frozen=True)
class OrthantCone:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("cone dimension must be >= 1")

    def project(self, x) -> np.ndarray:
        """Componentwise clamp to the orthant (Euclidean projection)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        return np.maximum(x, 0.0)

    def contains(self, x, tol: float = DEFAULT_ACTIVITY_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol))

    def active_set(self, x, tol: float = DEFAULT_ACTIVITY_TOL) -> FaceDescriptor:
        """Indices i with x_i <= tol; empty for interior points.

        Raises NotInCone when some coordinate is below -tol.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        if np.any(x < -tol):
            bad = int(np.argmin(x))
            raise NotInCone(f"coordinate {bad} is {x[bad]:.3e} < -tol")
        return FaceDescriptor(frozenset(np.nonzero(x <= tol)[0].tolist()))

    def to_json(self) -> dict:
        return {"type": "orthant", "n": self.n}

    @classmethod
    def from_json(cls, data: dict) -> "OrthantCone":
        if data.get("type") != "orthant":
            raise ValueError(f"unsupported cone type {data.get('type')!r}")
        return cls(int(data["n"]))


def project(x) -> np.ndarray:
    """Projection onto the orthant of matching dimension."""
    x = np.asarray(x, dtype=float)
    return np.maximum(x, 0.0)
