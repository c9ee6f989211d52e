"""Independent certification and falsification of Lyapunov certificates.

Two one-polynomial checkers:

* a vertex-tuple checker over refined simplicial partitions, which can both
  certify nonnegativity on the orthant and falsify it with an explicit
  witness point, and
* a coefficient-positivity checker: substitute squares, multiply by growing
  powers of |y|^2 and look for all-nonnegative coefficients (one-sided, never
  falsifies).

``verify_certificate`` rebuilds the decrease polynomials from a certificate
and requires every polynomial to be certified by at least one checker;
``sample_decrease_check`` corroborates with the exact pointwise multiplier on
a deterministic low-discrepancy sample.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .comp import solve_multiplier
from .poly import Polynomial
from .simplex import standard_partition
from .synth import Certificate, ProblemSpec, decrease_polynomials
from ._vertex_tuples import poly_dense_stack, partition_vertex_stack, tuple_values

FALSIFY_TOL = 1e-10
DEFAULT_MAX_LEVEL = 8
DEFAULT_POLYA_DMAX = 8
DEFAULT_NUM_SAMPLES = 2000


def worker_count() -> int:
    """Worker cap from COPOLYAP_THREADS (default: up to 4)."""
    cap = os.environ.get("COPOLYAP_THREADS")
    if cap is not None:
        return max(1, int(cap))
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class CheckOutcome:
    status: str  # "certified" | "falsified" | "unknown"
    method: str | None = None  # "tensor" | "polya"
    param: int | None = None  # partition level or lift degree
    witness: tuple[float, ...] | None = None
    value: float | None = None

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        data = {"status": self.status, "param": self.param}
        if self.method is not None:
            data["method"] = self.method
        if self.witness is not None:
            data["witness"] = list(self.witness)
            data["value"] = self.value
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CheckOutcome":
        return cls(
            status=data["status"],
            method=data.get("method"),
            param=data.get("param"),
            witness=tuple(data["witness"]) if "witness" in data else None,
            value=data.get("value"),
        )


def _cert_tol(values: np.ndarray) -> float:
    # absorbs roundoff from LP-tight constraints recomputed along another path
    scale = float(np.abs(values).max()) if values.size else 0.0
    return 1e-12 * (1.0 + scale)


def check_copositive_tensor(p: Polynomial, max_level: int = DEFAULT_MAX_LEVEL,
                            falsify_tol: float = FALSIFY_TOL) -> CheckOutcome:
    """Certify p >= 0 on the orthant via vertex-tuple values, refining the
    partition until certified, falsified at a vertex, or out of budget."""
    degree = p.homogeneous_degree()
    if p.is_zero():
        return CheckOutcome("certified", "tensor", 0)
    if degree < 1:
        c = p.eval(np.zeros(p.nvars))
        if c >= 0:
            return CheckOutcome("certified", "tensor", 0)
        return CheckOutcome("falsified", "tensor", 0, tuple(np.zeros(p.nvars)), c)
    if p.nvars == 1:
        c = p.eval(np.ones(1))
        if c >= -_cert_tol(np.array([c])):
            return CheckOutcome("certified", "tensor", 0)
        if c < -falsify_tol:
            return CheckOutcome("falsified", "tensor", 0, (1.0,), float(c))
        return CheckOutcome("unknown", "tensor", 0)

    dense = poly_dense_stack(p, degree)
    partition = standard_partition(p.nvars, 0)
    for level in range(max_level + 1):
        if level > 0:
            partition = partition.refine_all()
        verts = partition_vertex_stack(partition)
        values = tuple_values(dense, verts, degree)
        if values.min() >= -_cert_tol(values):
            return CheckOutcome("certified", "tensor", level)
        points = partition.vertex_array()
        evals = p.eval_many(points)
        worst = int(np.argmin(evals))
        if evals[worst] < -falsify_tol:
            return CheckOutcome(
                "falsified", "tensor", level,
                tuple(points[worst]), float(evals[worst]),
            )
    return CheckOutcome("unknown", "tensor", max_level)


def check_copositive_polya(p: Polynomial, d_max: int = DEFAULT_POLYA_DMAX) -> CheckOutcome:
    """Smallest lift degree at which all coefficients of |y|^(2d) p(y^2) are
    nonnegative; one-sided (never falsifies)."""
    if p.is_zero():
        return CheckOutcome("certified", "polya", 0)
    q = p.substitute_squares()
    for d in range(d_max + 1):
        if d > 0:
            q = q.multiply_norm_power(1)
        coefs = np.array(list(q.terms.values()))
        if coefs.min() >= -_cert_tol(coefs):
            return CheckOutcome("certified", "polya", d)
    return CheckOutcome("unknown", "polya", d_max)


def check_copositive(p: Polynomial, max_level: int = DEFAULT_MAX_LEVEL,
                     d_max: int = DEFAULT_POLYA_DMAX) -> CheckOutcome:
    """Tensor check first (two-sided), coefficient-positivity as fallback."""
    out = check_copositive_tensor(p, max_level)
    if out.status in ("certified", "falsified"):
        return out
    alt = check_copositive_polya(p, d_max)
    return alt if alt.certified else out


@dataclass(frozen=True)
class SamplingStats:
    max_derivative: float
    min_h: float
    num_samples: int
    worst_point: tuple[float, ...] | None = None
    violations: int = 0
    tol: float = 1e-8

    def to_json(self) -> dict:
        data = {
            "max_derivative": self.max_derivative,
            "min_h": self.min_h,
            "num_samples": self.num_samples,
            "violations": self.violations,
            "tol": self.tol,
        }
        if self.worst_point is not None:
            data["worst_point"] = list(self.worst_point)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "SamplingStats":
        return cls(
            max_derivative=float(data["max_derivative"]),
            min_h=float(data["min_h"]),
            num_samples=int(data["num_samples"]),
            worst_point=tuple(data["worst_point"]) if "worst_point" in data else None,
            violations=int(data.get("violations", 0)),
            tol=float(data.get("tol", 1e-8)),
        )


@dataclass(frozen=True)
class VerificationReport:
    """Per-polynomial outcomes plus optional sampling corroboration."""

    h: CheckOutcome
    s0: CheckOutcome
    faces: tuple[CheckOutcome, ...]
    sampling: SamplingStats | None = None
    tolerances: dict = field(default_factory=dict)

    @property
    def aggregate(self) -> str:
        outcomes = [self.h, self.s0, *self.faces]
        if any(o.status == "falsified" for o in outcomes):
            return "falsified"
        if all(o.certified for o in outcomes):
            return "certified"
        return "unknown"

    @property
    def certified(self) -> bool:
        return self.aggregate == "certified"

    def to_json(self) -> dict:
        data = {
            "h": self.h.to_json(),
            "s0": self.s0.to_json(),
            "faces": [f.to_json() for f in self.faces],
            "aggregate": self.aggregate,
            "tolerances": self.tolerances,
        }
        if self.sampling is not None:
            data["sampling"] = self.sampling.to_json()
        return data

    @classmethod
    def from_json(cls, data: dict) -> "VerificationReport":
        return cls(
            h=CheckOutcome.from_json(data["h"]),
            s0=CheckOutcome.from_json(data["s0"]),
            faces=tuple(CheckOutcome.from_json(f) for f in data["faces"]),
            sampling=SamplingStats.from_json(data["sampling"]) if "sampling" in data else None,
            tolerances=dict(data.get("tolerances", {})),
        )


def verify_certificate(problem: ProblemSpec, cert: Certificate,
                       max_level: int = DEFAULT_MAX_LEVEL,
                       polya_dmax: int = DEFAULT_POLYA_DMAX) -> VerificationReport:
    """Full re-derivation and copositivity check of h, s0 and every face
    polynomial; certified only when every polynomial is certified by at least
    one checker."""
    if cert.h.nvars != problem.n:
        raise ValueError("certificate dimension does not match the problem")
    s0, faces = decrease_polynomials(problem, cert.h, cert.r)
    named = [cert.h, s0, *faces]

    def run(p):
        return check_copositive(p, max_level, polya_dmax)

    workers = worker_count()
    if workers > 1 and len(named) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, named))
    else:
        outcomes = [run(p) for p in named]
    return VerificationReport(
        h=outcomes[0],
        s0=outcomes[1],
        faces=tuple(outcomes[2:]),
        tolerances={
            "falsify_tol": FALSIFY_TOL,
            "max_level": max_level,
            "polya_dmax": polya_dmax,
        },
    )


# -- deterministic low-discrepancy sampling ---------------------------------


def _rd_alphas(d: int) -> np.ndarray:
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (d + 1))
    return np.array([(1.0 / phi) ** (j + 1) for j in range(d)])


def simplex_samples(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points on the standard simplex in R^n (rows sum to 1).

    Deterministic for a given (n, count, seed); points with a coordinate
    below 1e-12 are dropped, so the row count may be slightly less than
    ``count``.
    """
    if n == 1:
        return np.ones((1, 1))
    d = n - 1
    alphas = _rd_alphas(d)
    start = np.mod(0.5 + seed * 0.7548776662466927, 1.0)
    idx = np.arange(1, count + 1, dtype=float)[:, None]
    u = np.mod(start + idx * alphas[None, :], 1.0)
    u.sort(axis=1)
    pts = np.diff(
        np.concatenate([np.zeros((count, 1)), u, np.ones((count, 1))], axis=1), axis=1
    )
    return pts[pts.min(axis=1) > 1e-12]


def sample_decrease_check(problem: ProblemSpec, cert: Certificate,
                          num_samples: int = DEFAULT_NUM_SAMPLES, seed: int = 0,
                          tol: float = 1e-8) -> SamplingStats:
    """Evaluate <grad V, f + eta> with the exact pointwise multiplier on
    interior and per-face samples; max should not exceed ``tol``."""
    n = problem.n
    batches = [simplex_samples(n, num_samples, seed)]
    for i in range(n):
        sub = simplex_samples(n - 1, num_samples, seed + 1 + i)
        pts = np.insert(sub, i, 0.0, axis=1)
        batches.append(pts)
    points = np.vstack(batches)

    max_deriv = -np.inf
    min_h = np.inf
    worst = None
    violations = 0
    for x in points:
        fx = np.array([f.eval(x) for f in problem.field])
        face = problem.cone.active_set(x)
        eta = solve_multiplier(fx, face).eta
        deriv = float(cert.v_gradient(x) @ (fx + eta))
        min_h = min(min_h, cert.h.eval(x))
        if deriv > max_deriv:
            max_deriv = deriv
            worst = tuple(float(v) for v in x)
        if deriv > tol:
            violations += 1
    return SamplingStats(
        max_derivative=float(max_deriv),
        min_h=float(min_h),
        num_samples=points.shape[0],
        worst_point=worst,
        violations=violations,
        tol=tol,
    )


def revalidate(named_polys: list[Polynomial], max_level: int = DEFAULT_MAX_LEVEL,
               d_max: int = DEFAULT_POLYA_DMAX) -> tuple[bool, list[CheckOutcome]]:
    """Soundness gate used by the synthesizers: every polynomial must be
    certified by at least one checker."""
    outcomes = [check_copositive(p, max_level, d_max) for p in named_polys]
    return all(o.certified for o in outcomes), outcomes
