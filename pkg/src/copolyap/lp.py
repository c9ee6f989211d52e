"""Self-contained dense linear-programming solver.

Two-phase primal simplex on a dense float64 tableau with Bland's
anti-cycling rule, deterministic for a fixed constraint ordering.  Decision
variables are free (sign-unrestricted) and are split internally into
positive parts.  Constraints are rows of the form  row . x >= rhs  or
row . x == rhs; the objective is minimized and may be zero for pure
feasibility runs.

Feasible outcomes are re-checked against every constraint within an absolute
tolerance of 1e-7; a violation raises LpNumericalError rather than returning
a silently wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7


class LpStatus(Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class LpNumericalError(RuntimeError):
    """Simplex run that cannot be certified (singular basis, stalling, or a
    claimed-feasible point violating constraints)."""


GE = ">="
EQ = "="


@dataclass
class LpProblem:
    num_vars: int
    objective: np.ndarray | None = None
    constraints: list[tuple[np.ndarray, str, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.objective is None:
            self.objective = np.zeros(self.num_vars)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length does not match num_vars")

    def add(self, row, relation: str, rhs: float):
        row = np.asarray(row, dtype=float)
        if row.shape != (self.num_vars,):
            raise ValueError(
                f"constraint row has shape {row.shape}, expected ({self.num_vars},)"
            )
        if relation not in (GE, EQ):
            raise ValueError(f"relation must be '>=' or '=', got {relation!r}")
        self.constraints.append((row, relation, float(rhs)))


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    solution: np.ndarray | None = None
    objective_value: float | None = None


def _refresh_objective(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray):
    """Recompute the reduced-cost row exactly from the cost vector.

    The incremental z-row drifts over long pivot sequences; refreshing it
    removes the accumulated error so optimality and feasibility conclusions
    rest on exact bookkeeping.
    """
    m = tab.shape[0] - 1
    tab[m, :-1] = cost
    tab[m, -1] = 0.0
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            tab[m] -= cb * tab[i]


def _run_phase(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray,
               maxiter: int) -> int:
    """Pivot to optimality, refreshing the objective row until it is
    consistent; returns 0 = optimal, 1 = unbounded."""
    for _ in range(50):
        code = _kernels.lp_pivot_loop(tab, basis, PIVOT_TOL, maxiter)
        if code == 1:
            return 1
        if code == 2:
            raise LpNumericalError("simplex iteration limit reached")
        _refresh_objective(tab, basis, cost)
        if tab[-1, :-1].min() >= -10 * PIVOT_TOL:
            return 0
    raise LpNumericalError("objective row failed to stabilize")


def solve(problem: LpProblem, maxiter: int | None = None) -> LpOutcome:
    """Two-phase simplex; returns a vertex solution when feasible."""
    nv = problem.num_vars
    m = len(problem.constraints)
    if m == 0:
        return LpOutcome(LpStatus.FEASIBLE, np.zeros(nv), 0.0)

    rows = np.array([c[0] for c in problem.constraints], dtype=float)
    rels = [c[1] for c in problem.constraints]
    rhs = np.array([c[2] for c in problem.constraints], dtype=float)

    # split x = u - w; one slack/surplus column per >= row.  A >= row with
    # rhs <= 0 is negated into <=-form so its slack can start basic; rows
    # with positive rhs (and equalities, normalized to rhs >= 0) get an
    # artificial basic variable for phase 1.
    n_surplus = sum(1 for r in rels if r == GE)
    ncols = 2 * nv + n_surplus
    A = np.zeros((m, ncols))
    A[:, :nv] = rows
    A[:, nv : 2 * nv] = -rows
    b = rhs.copy()
    slack_basis = np.full(m, -1, dtype=np.int64)
    s_idx = 0
    for i, rel in enumerate(rels):
        if rel == GE:
            col = 2 * nv + s_idx
            if b[i] <= 0.0:
                A[i] *= -1.0
                b[i] *= -1.0
                A[i, col] = 1.0
                slack_basis[i] = col
            else:
                A[i, col] = -1.0
            s_idx += 1
        elif b[i] < 0.0:
            A[i] *= -1.0
            b[i] *= -1.0

    # phase 1: artificials where no slack is basic; minimize their sum
    art_rows = np.nonzero(slack_basis < 0)[0]
    n_art = len(art_rows)
    art = ncols
    tab = np.zeros((m + 1, ncols + n_art + 1))
    tab[:m, :ncols] = A
    tab[:m, -1] = b
    basis = np.zeros(m, dtype=np.int64)
    for k, i in enumerate(art_rows):
        tab[i, art + k] = 1.0
        basis[i] = art + k
    for i in range(m):
        if slack_basis[i] >= 0:
            basis[i] = slack_basis[i]
    cost1 = np.zeros(ncols + n_art)
    cost1[art : art + n_art] = 1.0
    _refresh_objective(tab, basis, cost1)

    if maxiter is None:
        maxiter = 200 * (m + ncols + 10)
    if _run_phase(tab, basis, cost1, maxiter) == 1:
        raise LpNumericalError("artificial phase reported unbounded")
    if tab[m, -1] < -FEAS_TOL:
        return LpOutcome(LpStatus.INFEASIBLE)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] < art:
            keep.append(i)
            continue
        pivot_col = -1
        for j in range(ncols):
            if abs(tab[i, j]) > PIVOT_TOL:
                pivot_col = j
                break
        if pivot_col < 0:
            continue  # redundant row
        piv = tab[i, pivot_col]
        tab[i] /= piv
        for r in range(m + 1):
            if r != i and tab[r, pivot_col] != 0.0:
                tab[r] -= tab[r, pivot_col] * tab[i]
        basis[i] = pivot_col
        keep.append(i)

    # phase 2 tableau without artificial columns
    rows2 = keep
    m2 = len(rows2)
    tab2 = np.zeros((m2 + 1, ncols + 1))
    tab2[:m2, :ncols] = tab[rows2, :ncols]
    tab2[:m2, -1] = tab[rows2, -1]
    basis2 = basis[rows2].copy()

    cost = np.concatenate([problem.objective, -problem.objective, np.zeros(n_surplus)])
    _refresh_objective(tab2, basis2, cost)

    code = _run_phase(tab2, basis2, cost, maxiter)
    if code == 1:
        return LpOutcome(LpStatus.UNBOUNDED)

    xfull = np.zeros(ncols)
    for i in range(m2):
        xfull[basis2[i]] = tab2[i, -1]
    x = xfull[:nv] - xfull[nv : 2 * nv]

    residual_ok = True
    for row, rel, r in problem.constraints:
        v = float(row @ x)
        if rel == EQ and abs(v - r) > FEAS_TOL:
            residual_ok = False
        if rel == GE and v < r - FEAS_TOL:
            residual_ok = False
    if not residual_ok:
        raise LpNumericalError("solution fails post-solve feasibility check")
    return LpOutcome(LpStatus.FEASIBLE, x, float(problem.objective @ x))
