"""Certificate synthesis by coefficient positivity.

Orthant nonnegativity of a homogeneous polynomial is certified by
substituting squares (x_i = y_i**2), multiplying by a power of |y|^2 and
requiring every coefficient of the product to be nonnegative; the lift
degree is the hierarchy parameter.  Each grid node (r, q, d) is one LP over
the template coefficients of h: lifted h-coefficients >= margin, lifted
decrease-polynomial coefficients >= 0, coefficient-sum normalization = 1.

The denominator exponent r starts at 1 in this search (numerator degrees are
then at least 2r+1 = 3); the verifier accepts certificates with any r.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import lp as lpmod
from .lp import LpProblem, LpNumericalError, LpStatus
from .disc import SynthResult
from .poly import norm_sq_poly
from .synth import (
    Certificate,
    CoefficientTemplate,
    ProblemSpec,
    build_s0,
    build_s_face,
    make_template,
)
from .verify import revalidate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolyaOptions:
    q_max: int = 6
    r_max: int = 2
    d_max: int = 8
    margin: float = 1e-6

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if min(self.q_max, self.r_max, self.d_max) < 0:
            raise ValueError("degrees must be nonnegative")


def polya_lift(t: CoefficientTemplate, d: int) -> CoefficientTemplate:
    """Multiply a (squares-substituted) template by (sum_i y_i**2)**d."""
    if d < 0:
        raise ValueError("lift degree must be nonnegative")
    out = t
    if d > 0 and t.terms:
        norm_sq = norm_sq_poly(t.nvars)
        for _ in range(d):
            out = out.mul_poly(norm_sq)
    return out


def _coefficient_rows(template: CoefficientTemplate, problem: LpProblem, rhs: float):
    for _, lin, const in template.coefficient_rows():
        problem.add(lin, lpmod.GE, rhs - const)


def assemble_lift_lp(h: CoefficientTemplate, h_lifted: CoefficientTemplate,
                     s_lifted: list[CoefficientTemplate],
                     margin: float) -> LpProblem:
    problem = LpProblem(num_vars=h.num_coeffs)
    row, const = h.normalization_row()
    problem.add(row, lpmod.EQ, 1.0 - const)
    _coefficient_rows(h_lifted, problem, margin)
    for t in s_lifted:
        _coefficient_rows(t, problem, 0.0)
    return problem


def synthesize(problem: ProblemSpec, opts: PolyaOptions | None = None) -> SynthResult:
    """Grid search over (r ascending from 1; q ascending; lift d ascending)."""
    opts = opts or PolyaOptions()
    result = SynthResult(certificate=None)
    n = problem.n

    for r in range(1, opts.r_max + 1):
        for q in range(max(1, 2 * r + 1), opts.q_max + 1):
            h = make_template(n, q)
            s_templates = [build_s0(h, problem.field, r)]
            for i in range(n):
                s_templates.append(build_s_face(h, problem.field, r, i))
            h_sq = h.substitute_squares()
            s_sq = [t.substitute_squares() for t in s_templates]
            h_lift = h_sq
            s_lift = list(s_sq)
            for d in range(opts.d_max + 1):
                if d > 0:
                    h_lift = polya_lift(h_lift, 1)
                    s_lift = [polya_lift(t, 1) for t in s_lift]
                node = {"r": r, "q": q, "d": d}
                result.nodes_tried += 1
                lp_problem = assemble_lift_lp(h, h_lift, s_lift, opts.margin)
                try:
                    outcome = lpmod.solve(lp_problem)
                except LpNumericalError as exc:
                    result.skipped.append(f"r={r} q={q} d={d}: {exc}")
                    node["status"] = "lp-error"
                    result.trace.append(node)
                    continue
                if outcome.status != LpStatus.FEASIBLE:
                    node["status"] = "infeasible"
                    result.trace.append(node)
                    continue
                h_poly = h.fix(outcome.solution)
                from .synth import decrease_polynomials

                s0_poly, face_polys = decrease_polynomials(problem, h_poly, r)
                ok, _ = revalidate([h_poly, s0_poly, *face_polys])
                if not ok:
                    node["status"] = "revalidation-failed"
                    result.trace.append(node)
                    result.skipped.append(f"r={r} q={q} d={d}: revalidation failed")
                    continue
                node["status"] = "feasible"
                result.trace.append(node)
                result.certificate = Certificate(
                    h=h_poly,
                    r=r,
                    method="polya",
                    params={"polya_degree": d, "degree": q},
                    margin=opts.margin,
                )
                logger.info("found certificate at r=%d q=%d d=%d", r, q, d)
                return result
    return result
