"""Complementarity multiplier solvers.

The dynamics need only the decoupled orthant case with identity matrix: at a
boundary point the multiplier solves a complementarity problem over the
tangent cone, which splits per coordinate into eta_j = max(0, -f_j) on the
active set.  A small-instance enumeration solver over all complementary
support sets is kept alongside as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cone import FaceDescriptor

COMPLEMENTARITY_TOL = 1e-10


class LcpNoSolution(RuntimeError):
    pass


class LcpMultipleSolutions(RuntimeError):
    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        super().__init__(f"{len(self.witnesses)} distinct solutions found")


@dataclass(frozen=True)
class LcpProblem:
    """Complementarity data 0 <= eta perp q + M eta >= 0, optionally limited
    to the tangent cone at a face of the orthant."""

    q: np.ndarray
    M: np.ndarray
    face: FaceDescriptor | None = None

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        M = np.asarray(self.M, dtype=float)
        if M.shape != (q.shape[0], q.shape[0]):
            raise ValueError(f"matrix shape {M.shape} does not match q of length {q.shape[0]}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "M", M)

    def solve(self) -> "LccpSolution":
        return solve_lcp_enumeration(self.q, self.M, face=self.face)


@dataclass(frozen=True)
class LccpSolution:
    eta: np.ndarray
    active_multipliers: tuple[int, ...]
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))


def _make_solution(eta: np.ndarray, q: np.ndarray, M: np.ndarray) -> LccpSolution:
    eta = np.where(np.abs(eta) < COMPLEMENTARITY_TOL, 0.0, eta)
    active = tuple(int(i) for i in np.nonzero(eta > 0)[0])
    objective = float(eta @ (q + M @ eta))
    return LccpSolution(eta=eta, active_multipliers=active, objective=objective)


def solve_multiplier(f_val, face: FaceDescriptor) -> LccpSolution:
    """Multiplier of the constrained dynamics at a point with the given face.

    For the orthant with identity matrix the problem decouples:
    eta_j = max(0, -f_j) on active coordinates, 0 elsewhere.
    """
    f_val = np.asarray(f_val, dtype=float)
    n = f_val.shape[0]
    eta = np.zeros(n)
    for j in face.active:
        if f_val[j] < 0.0:
            eta[j] = -f_val[j]
    return _make_solution(eta, f_val, np.eye(n))


def enumerate_lcp_solutions(q, M, face: FaceDescriptor | None = None,
                            tol: float = COMPLEMENTARITY_TOL) -> list[LccpSolution]:
    """All solutions of 0 <= eta  perp  q + M eta >= 0 found by support
    enumeration (the >= constraint on q + M eta applies only within the face
    coordinates when a face is given; off-face coordinates are forced to
    eta = 0 with the complementary side unconstrained).
    """
    q = np.asarray(q, dtype=float)
    M = np.asarray(M, dtype=float)
    n = q.shape[0]
    if M.shape != (n, n):
        raise ValueError(f"matrix shape {M.shape} does not match q of length {n}")
    if n > 20:
        raise ValueError("enumeration oracle limited to n <= 20")
    indices = sorted(face.active) if face is not None else list(range(n))
    solutions: list[np.ndarray] = []
    for size in range(len(indices) + 1):
        for support in combinations(indices, size):
            eta = np.zeros(n)
            if support:
                sub = M[np.ix_(support, support)]
                try:
                    eta_b = np.linalg.solve(sub, -q[list(support)])
                except np.linalg.LinAlgError:
                    continue
                if np.any(eta_b < -tol):
                    continue
                eta[list(support)] = np.maximum(eta_b, 0.0)
            w = q + M @ eta
            check = [i for i in indices if i not in support]
            if any(w[i] < -tol for i in check):
                continue
            if abs(eta @ w) > max(tol, tol * np.abs(w).max() * max(1.0, np.abs(eta).max())):
                continue
            if not any(np.allclose(eta, s, atol=10 * tol) for s in solutions):
                solutions.append(eta)
    return [_make_solution(eta, q, M) for eta in solutions]


def solve_lcp_enumeration(q, M, face: FaceDescriptor | None = None,
                          tol: float = COMPLEMENTARITY_TOL) -> LccpSolution:
    """Unique solution by support enumeration.

    Raises LcpNoSolution when no complementary support works (M outside any
    solvable class) and LcpMultipleSolutions carrying every witness when the
    solution is not unique.
    """
    found = enumerate_lcp_solutions(q, M, face=face, tol=tol)
    if not found:
        raise LcpNoSolution("no complementary support set yields a solution")
    if len(found) > 1:
        raise LcpMultipleSolutions(found)
    return found[0]
