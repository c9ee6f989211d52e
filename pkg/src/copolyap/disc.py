"""Certificate synthesis by simplicial discretization.

Hierarchy driver: refine the partition of the standard simplex level by
level (nominal mesh 1, 1/2, 1/4, ... down to ``delta_min``); at each level
sweep denominators r and numerator degrees ascending and solve one LP
feasibility problem per node.  Constraint generation realizes the inner
approximation of the copositive cone: for every cell and every multiset of
deg-many cell vertices, the multilinear vertex-tuple value of the template
must be nonnegative (with a strict margin on the candidate numerator h), plus
a coefficient-sum normalization that rules out the zero polynomial.

Face handling modes:

* "conservative" (default): one face template per face, built with the
  active-multiplier branch on the whole face (sound; possibly infeasible
  when the field points inward on part of a face).
* "sign_split": face cells are bisected until the i-th field component has a
  uniform vertex sign, and the matching branch (active multiplier or zero
  multiplier) is applied per cell; cells still mixed at the split budget get
  both constraints.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import lp as lpmod
from .lp import LpProblem, LpStatus, LpNumericalError
from .poly import Polynomial
from .simplex import Simplex, SimplicialPartition, boundary_partition, standard_partition
from .synth import (
    Certificate,
    CoefficientTemplate,
    ProblemSpec,
    build_s0,
    build_s_face,
    build_s_face_inactive,
    make_template,
)
from ._vertex_tuples import template_dense_stack, tuple_values
from .verify import revalidate

logger = logging.getLogger(__name__)

MODES = ("conservative", "sign_split")
SIGN_SPLIT_EXTRA_DEPTH = 6


@dataclass(frozen=True)
class DiscOptions:
    d_max: int = 6
    r_max: int = 2
    delta_min: float = 2.0**-6
    margin: float = 1e-6
    mode: str = "conservative"

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        k = round(-math.log2(self.delta_min))
        if k < 0 or abs(self.delta_min - 2.0**-k) > 1e-12:
            raise ValueError("delta_min must be a nonnegative power of 1/2")
        object.__setattr__(self, "_max_level", k)

    @property
    def max_level(self) -> int:
        return self._max_level


@dataclass
class SynthResult:
    certificate: Certificate | None
    nodes_tried: int = 0
    skipped: list[str] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.certificate is not None


def _tuple_rows(template: CoefficientTemplate, cells, lp_problem: LpProblem,
                rhs: float):
    """Append one >= constraint per (cell, vertex multiset) tuple value."""
    degree = template.homogeneous_degree()
    if degree == 0 or not template.terms:
        return
    verts = np.ascontiguousarray(
        np.array([s.vertices for s in cells], dtype=float)
    )
    stack = template_dense_stack(template, degree)
    values = tuple_values(stack, verts, degree)  # (S, T, m+1)
    m = template.num_coeffs
    for s in range(values.shape[0]):
        for t in range(values.shape[1]):
            row = values[s, t, :m]
            const = values[s, t, m]
            lp_problem.add(row, lpmod.GE, rhs - const)


def assemble_constraints(h: CoefficientTemplate,
                         partition: SimplicialPartition,
                         s0: CoefficientTemplate | None = None,
                         face_blocks=None,
                         margin: float = 0.0) -> LpProblem:
    """LP with normalization, h-tuples >= margin and decrease tuples >= 0.

    ``face_blocks`` is a list of (template, cells) pairs carrying face
    constraints over (n-1)-variable partitions.
    """
    problem = LpProblem(num_vars=h.num_coeffs)
    row, const = h.normalization_row()
    problem.add(row, lpmod.EQ, 1.0 - const)
    _tuple_rows(h, partition.simplices, problem, margin)
    if s0 is not None:
        _tuple_rows(s0, partition.simplices, problem, 0.0)
    for template, cells in face_blocks or []:
        _tuple_rows(template, cells, problem, 0.0)
    return problem


def _face_field_on_face(problem: ProblemSpec, i: int) -> Polynomial:
    return problem.field[i].restrict_to_face(i).drop_variable(i)


def _split_by_sign(cell: Simplex, fi_face: Polynomial, depth: int):
    """Partition a face cell into (eta_branch_cells, zero_branch_cells,
    mixed_cells) according to the vertex signs of the field component."""
    eta_cells, zero_cells, mixed = [], [], []
    stack = [(cell, 0)]
    while stack:
        s, d = stack.pop()
        vals = np.array([fi_face.eval(v) for v in s.vertices])
        if np.all(vals <= 1e-12):
            eta_cells.append(s)
        elif np.all(vals >= -1e-12):
            zero_cells.append(s)
        elif d < depth and s.num_vertices >= 2:
            a, b = s.bisect()
            stack.append((a, d + 1))
            stack.append((b, d + 1))
        else:
            mixed.append(s)
    return eta_cells, zero_cells, mixed


def _build_face_blocks(problem: ProblemSpec, h: CoefficientTemplate, r: int,
                       partition: SimplicialPartition, mode: str):
    blocks = []
    for i in range(problem.n):
        face_part = boundary_partition(partition, i)
        if not face_part.simplices:
            continue
        t_eta = build_s_face(h, problem.field, r, i)
        if mode == "conservative":
            blocks.append((t_eta, face_part.simplices))
            continue
        t_zero = build_s_face_inactive(h, problem.field, r, i)
        fi = _face_field_on_face(problem, i)
        eta_cells, zero_cells, mixed = [], [], []
        for cell in face_part.simplices:
            e, z, m = _split_by_sign(cell, fi, SIGN_SPLIT_EXTRA_DEPTH)
            eta_cells.extend(e)
            zero_cells.extend(z)
            mixed.extend(m)
        if eta_cells or mixed:
            blocks.append((t_eta, tuple(eta_cells) + tuple(mixed)))
        if zero_cells or mixed:
            blocks.append((t_zero, tuple(zero_cells) + tuple(mixed)))
    return blocks


def _revalidate_node(problem: ProblemSpec, h_poly: Polynomial, r: int,
                     mode: str, face_blocks, solution) -> bool:
    """Independent soundness gate on the fixed polynomials.

    Conservative mode re-checks h, s0 and every face polynomial globally.
    sign_split certificates are valid per branch region, so faces are
    re-checked cell-wise on their assigned cells instead.
    """
    from .synth import decrease_polynomials

    s0, faces = decrease_polynomials(problem, h_poly, r)
    if mode == "conservative":
        ok, _ = revalidate([h_poly, s0, *faces])
        return ok
    ok, _ = revalidate([h_poly, s0])
    if not ok:
        return False
    for template, cells in face_blocks:
        fixed = template.fix(solution)
        degree = fixed.homogeneous_degree()
        if fixed.is_zero():
            continue
        verts = np.ascontiguousarray(np.array([s.vertices for s in cells], dtype=float))
        stack = fixed.dense_tensor(degree).reshape(1, -1)
        values = tuple_values(stack, verts, degree)
        tol = 1e-12 * (1.0 + float(np.abs(values).max()))
        if values.min() < -tol:
            return False
    return True


def synthesize(problem: ProblemSpec, opts: DiscOptions | None = None) -> SynthResult:
    """Grid search over (level; r ascending; degree ascending), returning the
    first LP-feasible node whose fixed polynomials pass independent
    re-validation."""
    opts = opts or DiscOptions()
    result = SynthResult(certificate=None)
    n = problem.n
    partition = standard_partition(n, 0)
    templates: dict[tuple[int, int], tuple] = {}

    for level in range(opts.max_level + 1):
        if level > 0:
            partition = partition.refine_all()
        for r in range(opts.r_max + 1):
            for degree in range(max(2, 2 * r + 1), opts.d_max + 1):
                key = (r, degree)
                if key not in templates:
                    h = make_template(n, degree)
                    s0 = build_s0(h, problem.field, r)
                    templates[key] = (h, s0)
                h, s0 = templates[key]
                node = {"level": level, "r": r, "degree": degree}
                result.nodes_tried += 1
                face_blocks = _build_face_blocks(problem, h, r, partition, opts.mode)
                lp_problem = assemble_constraints(
                    h, partition, s0=s0, face_blocks=face_blocks, margin=opts.margin
                )
                try:
                    outcome = lpmod.solve(lp_problem)
                except LpNumericalError as exc:
                    result.skipped.append(f"level={level} r={r} degree={degree}: {exc}")
                    node["status"] = "lp-error"
                    result.trace.append(node)
                    continue
                if outcome.status != LpStatus.FEASIBLE:
                    node["status"] = "infeasible"
                    result.trace.append(node)
                    continue
                h_poly = h.fix(outcome.solution)
                ok = _revalidate_node(
                    problem, h_poly, r, opts.mode, face_blocks, outcome.solution
                )
                if not ok:
                    node["status"] = "revalidation-failed"
                    result.trace.append(node)
                    result.skipped.append(
                        f"level={level} r={r} degree={degree}: revalidation failed"
                    )
                    continue
                node["status"] = "feasible"
                result.trace.append(node)
                result.certificate = Certificate(
                    h=h_poly,
                    r=r,
                    method="disc",
                    params={
                        "level": level,
                        "nominal_delta": 2.0**-level,
                        "degree": degree,
                        "mode": opts.mode,
                    },
                    margin=opts.margin,
                )
                logger.info("found certificate at level=%d r=%d degree=%d", level, r, degree)
                return result
    return result
