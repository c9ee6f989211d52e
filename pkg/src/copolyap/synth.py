"""Shared synthesis scaffolding.

A candidate numerator h is a homogeneous polynomial whose coefficients are
unknown; CoefficientTemplate carries one affine form per monomial over the
LP decision vector.  From h and the vector field the two synthesis methods
derive the interior decrease polynomial

    s0 = -|x|^2 <grad h, f> + 2 r h <x, f>

and, per orthant face i, the face decrease polynomial s_i obtained by
substituting the face multiplier branch eta_i = -f_i(x) e_i (equivalently
zeroing the i-th field component), restricting to x_i = 0 and dropping the
face variable.  Both constructions are linear in the unknown coefficients.

The synthesized object is a Certificate: (h, r, method, parameters, margin)
defining the Lyapunov candidate V(x) = h(x) / |x|^(2r).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cone import OrthantCone
from .poly import Monomial, NotHomogeneous, Polynomial, grlex_key, monomials_of_degree


@dataclass(frozen=True)
class ProblemSpec:
    """Homogeneous vector field on the nonnegative orthant."""

    n: int
    cone: OrthantCone
    field: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "field", tuple(self.field))
        if self.cone.n != self.n:
            raise ValueError("cone dimension does not match n")
        if len(self.field) != self.n:
            raise ValueError(f"field has {len(self.field)} components, expected {self.n}")
        degs = set()
        for i, f in enumerate(self.field):
            if f.nvars != self.n:
                raise ValueError(f"field[{i}] is over {f.nvars} variables, expected {self.n}")
            if f.is_zero():
                continue
            d = f.homogeneous_degree()
            if d < 1:
                raise NotHomogeneous(f"field[{i}] has degree {d} < 1")
            degs.add(d)
        if len(degs) > 1:
            raise NotHomogeneous(f"field components have mixed degrees {sorted(degs)}")
        object.__setattr__(self, "_degree", degs.pop() if degs else 1)

    @property
    def degree(self) -> int:
        """Homogeneity degree of the field (1 when the field is zero)."""
        return self._degree

    def field_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(exps, coefs) with one coefficient row per component, shared monomials."""
        monos = sorted({m for f in self.field for m in f.terms}, key=grlex_key)
        if not monos:
            monos = [(0,) * self.n]
        exps = np.array(monos, dtype=np.int64).reshape(len(monos), self.n)
        coefs = np.zeros((self.n, len(monos)))
        col = {m: k for k, m in enumerate(monos)}
        for i, f in enumerate(self.field):
            for m, c in f.terms.items():
                coefs[i, col[m]] = c
        return exps, coefs

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cone": self.cone.to_json(),
            "field": [f.to_json() for f in self.field],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProblemSpec":
        return cls(
            n=int(data["n"]),
            cone=OrthantCone.from_json(data["cone"]),
            field=tuple(Polynomial.from_json(f) for f in data["field"]),
        )


def linear_problem(A) -> ProblemSpec:
    """ProblemSpec for the linear field f(x) = A x."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    comps = []
    for i in range(n):
        terms = {}
        for j in range(n):
            if A[i, j] != 0.0:
                exp = [0] * n
                exp[j] = 1
                terms[tuple(exp)] = A[i, j]
        comps.append(Polynomial(n, terms))
    return ProblemSpec(n=n, cone=OrthantCone(n), field=tuple(comps))


@dataclass(frozen=True)
class CoefficientTemplate:
    """Polynomial whose coefficients are affine forms over m decision vars.

    Each term value is a vector of length m + 1: the first m entries are the
    linear part, the last is the constant.  A fixed polynomial is a template
    with m == 0.
    """

    nvars: int
    num_coeffs: int
    terms: dict[Monomial, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, vec in self.terms.items():
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.num_coeffs + 1,):
                raise ValueError("affine form length must be num_coeffs + 1")
            if np.any(vec != 0.0):
                clean[tuple(int(e) for e in mono)] = vec
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, nvars: int, num_coeffs: int) -> "CoefficientTemplate":
        return cls(nvars, num_coeffs, {})

    @classmethod
    def from_polynomial(cls, p: Polynomial, num_coeffs: int = 0) -> "CoefficientTemplate":
        terms = {}
        for m, c in p.terms.items():
            vec = np.zeros(num_coeffs + 1)
            vec[-1] = c
            terms[m] = vec
        return cls(p.nvars, num_coeffs, terms)

    def homogeneous_degree(self) -> int:
        degs = {sum(m) for m in self.terms}
        if len(degs) > 1:
            raise NotHomogeneous(f"template monomials have mixed degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def __add__(self, other: "CoefficientTemplate") -> "CoefficientTemplate":
        if (self.nvars, self.num_coeffs) != (other.nvars, other.num_coeffs):
            raise ValueError("template shape mismatch")
        terms = {m: v.copy() for m, v in self.terms.items()}
        for m, v in other.terms.items():
            if m in terms:
                terms[m] = terms[m] + v
            else:
                terms[m] = v.copy()
        return CoefficientTemplate(self.nvars, self.num_coeffs, terms)

    def scale(self, factor: float) -> "CoefficientTemplate":
        return CoefficientTemplate(
            self.nvars, self.num_coeffs, {m: v * factor for m, v in self.terms.items()}
        )

    def mul_poly(self, p: Polynomial) -> "CoefficientTemplate":
        if p.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        terms: dict[Monomial, np.ndarray] = {}
        for m1, vec in self.terms.items():
            for m2, c in p.terms.items():
                key = tuple(a + b for a, b in zip(m1, m2))
                if key in terms:
                    terms[key] = terms[key] + c * vec
                else:
                    terms[key] = c * vec
        return CoefficientTemplate(self.nvars, self.num_coeffs, terms)

    def partial(self, j: int) -> "CoefficientTemplate":
        terms = {}
        for m, vec in self.terms.items():
            e = m[j]
            if e:
                key = m[:j] + (e - 1,) + m[j + 1 :]
                if key in terms:
                    terms[key] = terms[key] + e * vec
                else:
                    terms[key] = e * vec
        return CoefficientTemplate(self.nvars, self.num_coeffs, terms)

    def substitute_squares(self) -> "CoefficientTemplate":
        return CoefficientTemplate(
            self.nvars,
            self.num_coeffs,
            {tuple(2 * e for e in m): v for m, v in self.terms.items()},
        )

    def restrict_to_face(self, i: int) -> "CoefficientTemplate":
        return CoefficientTemplate(
            self.nvars, self.num_coeffs,
            {m: v for m, v in self.terms.items() if m[i] == 0},
        )

    def drop_variable(self, i: int) -> "CoefficientTemplate":
        for m in self.terms:
            if m[i] != 0:
                raise ValueError(f"monomial {m} still uses variable {i}")
        return CoefficientTemplate(
            self.nvars - 1, self.num_coeffs,
            {m[:i] + m[i + 1 :]: v for m, v in self.terms.items()},
        )

    def fix(self, coeffs) -> Polynomial:
        """Substitute decision-variable values, yielding a plain polynomial."""
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.num_coeffs,):
            raise ValueError(f"expected {self.num_coeffs} coefficient values")
        ext = np.concatenate([c, [1.0]])
        return Polynomial(self.nvars, {m: float(v @ ext) for m, v in self.terms.items()})

    def coefficient_rows(self):
        """(monomial, linear part, constant) triples in graded-lex order."""
        for m in sorted(self.terms, key=grlex_key):
            vec = self.terms[m]
            yield m, vec[: self.num_coeffs], float(vec[-1])

    def normalization_row(self) -> tuple[np.ndarray, float]:
        """Row and constant of the coefficient-sum form sum_monomials(value)."""
        row = np.zeros(self.num_coeffs)
        const = 0.0
        for _, lin, c in self.coefficient_rows():
            row += lin
            const += c
        return row, const


def make_template(n: int, degree: int) -> CoefficientTemplate:
    """Homogeneous degree-d template with one decision variable per monomial."""
    if degree < 1:
        raise ValueError("template degree must be >= 1")
    monos = monomials_of_degree(n, degree)
    m = len(monos)
    terms = {}
    for k, mono in enumerate(monos):
        vec = np.zeros(m + 1)
        vec[k] = 1.0
        terms[mono] = vec
    return CoefficientTemplate(n, m, terms)


def _directional_terms(h: CoefficientTemplate, field: Sequence[Polynomial],
                       r: int) -> CoefficientTemplate:
    """-|x|^2 <grad h, f> + 2 r h <x, f> for a (possibly modified) field."""
    n = h.nvars
    from .poly import norm_sq_poly

    grad_dot_f = CoefficientTemplate.zero(n, h.num_coeffs)
    for j in range(n):
        if field[j].is_zero():
            continue
        grad_dot_f = grad_dot_f + h.partial(j).mul_poly(field[j])
    out = grad_dot_f.mul_poly(norm_sq_poly(n)).scale(-1.0)
    if r > 0:
        x_dot_f = Polynomial.zero(n)
        for j in range(n):
            x_dot_f = x_dot_f + Polynomial.variable(n, j) * field[j]
        out = out + h.mul_poly(x_dot_f).scale(2.0 * r)
    return out


def build_s0(h: CoefficientTemplate, field: Sequence[Polynomial], r: int) -> CoefficientTemplate:
    """Interior decrease template; degree(h) + degree(f) + 1 homogeneous."""
    return _directional_terms(h, field, r)


def build_s_face(h: CoefficientTemplate, field: Sequence[Polynomial], r: int,
                 i: int) -> CoefficientTemplate:
    """Face-i decrease template in the n-1 face variables.

    Substitutes the face multiplier branch (i-th field component cancelled)
    and restricts to x_i = 0.
    """
    n = h.nvars
    if not 0 <= i < n:
        raise IndexError(f"face index {i} out of range")
    modified = list(field)
    modified[i] = Polynomial.zero(n)
    s = _directional_terms(h, modified, r)
    return s.restrict_to_face(i).drop_variable(i)


def build_s_face_inactive(h: CoefficientTemplate, field: Sequence[Polynomial],
                          r: int, i: int) -> CoefficientTemplate:
    """Face-i decrease template for the zero-multiplier branch (full field)."""
    s = _directional_terms(h, field, r)
    return s.restrict_to_face(i).drop_variable(i)


def decrease_polynomials(problem: ProblemSpec, h: Polynomial, r: int
                         ) -> tuple[Polynomial, list[Polynomial]]:
    """s0 and the face polynomials for a fixed numerator h."""
    ht = CoefficientTemplate.from_polynomial(h)
    s0 = build_s0(ht, problem.field, r).fix([])
    faces = [build_s_face(ht, problem.field, r, i).fix([]) for i in range(problem.n)]
    return s0, faces


@dataclass(frozen=True)
class Certificate:
    """Persisted synthesis output defining V(x) = h(x) / |x|^(2r)."""

    h: Polynomial
    r: int
    method: str
    params: dict = field(default_factory=dict)
    margin: float = 0.0
    report: "object | None" = None  # VerificationReport, set after checking

    def __post_init__(self):
        d = self.h.homogeneous_degree()
        if self.h.is_zero():
            raise ValueError("certificate numerator must be nonzero")
        if d < 2 * self.r + 1:
            raise ValueError(
                f"numerator degree {d} violates degree >= 2r+1 = {2 * self.r + 1}"
            )

    @property
    def v_degree(self) -> int:
        """Homogeneity degree of V."""
        return self.h.homogeneous_degree() - 2 * self.r

    def v_value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        nsq = float(x @ x)
        if nsq == 0.0:
            return 0.0
        return self.h.eval(x) / nsq**self.r

    def v_gradient(self, x) -> np.ndarray:
        """grad V = (|x|^2 grad h - 2 r h x) / |x|^(2r+2); x must be nonzero."""
        x = np.asarray(x, dtype=float)
        nsq = float(x @ x)
        if nsq == 0.0:
            raise ZeroDivisionError("gradient of V is undefined at the origin")
        gh = np.array([g.eval(x) for g in self.h.gradient()])
        return (nsq * gh - 2 * self.r * self.h.eval(x) * x) / nsq ** (self.r + 1)

    def with_report(self, report) -> "Certificate":
        return replace(self, report=report)

    def to_json(self) -> dict:
        data = {
            "method": self.method,
            "r": self.r,
            "h": self.h.to_json(),
            "params": self.params,
            "margin": self.margin,
        }
        if self.report is not None:
            data["report"] = self.report.to_json()
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        from .verify import VerificationReport

        report = None
        if "report" in data and data["report"] is not None:
            report = VerificationReport.from_json(data["report"])
        return cls(
            h=Polynomial.from_json(data["h"]),
            r=int(data["r"]),
            method=str(data["method"]),
            params=dict(data.get("params", {})),
            margin=float(data.get("margin", 0.0)),
            report=report,
        )


def assemble_V(cert: Certificate):
    """Evaluable V(x) = h(x) / |x|^(2r) with V(0) = 0."""
    return cert.v_value
