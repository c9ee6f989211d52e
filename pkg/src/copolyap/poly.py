"""Sparse multivariate polynomial arithmetic and symmetric multilinear forms.

A polynomial in ``nvars`` variables is a finite map from exponent tuples to
float coefficients; zero coefficients are never stored, so the zero
polynomial has an empty term map.  Values are treated as immutable after
construction and are safe to share between threads.

A homogeneous polynomial of degree d admits a symmetric order-d multilinear
form G with G[x, ..., x] = p(x).  G is stored canonically: one entry per
sorted index tuple, with the monomial coefficient divided by the number of
distinct permutations of that tuple, so memory grows with the number of
monomials rather than nvars**d.

Serialized form (used by the JSON interfaces):
    {"nvars": n, "terms": [{"exp": [e1, ..., en], "coef": c}, ...]}
with terms in graded-lexicographic order (total degree first, then the
exponent tuple) and no zero coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

Monomial = tuple[int, ...]

REL_TOL = 1e-9  # blanket relative tolerance for float comparisons


def grlex_key(mono: Monomial):
    return (sum(mono), mono)


def monomials_of_degree(nvars: int, degree: int) -> list[Monomial]:
    """All exponent tuples of the given total degree, graded-lex sorted."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for j in combo:
            exp[j] += 1
        out.append(tuple(exp))
    out.sort(key=grlex_key)
    return out


def multinomial(exp: Monomial) -> int:
    """Number of distinct index arrangements d! / prod(e_i!)."""
    num = math.factorial(sum(exp))
    for e in exp:
        num //= math.factorial(e)
    return num


def _distinct_permutations(items: tuple[int, ...]):
    """Distinct permutations of a multiset, in lexicographic order."""
    seq = sorted(items)
    n = len(seq)
    yield tuple(seq)
    while True:
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1 :] = reversed(seq[i + 1 :])
        yield tuple(seq)


class DimensionMismatch(ValueError):
    pass


class NotHomogeneous(ValueError):
    pass


@dataclass(frozen=True)
class Polynomial:
    """Sparse real polynomial; ``terms`` maps exponent tuples to coefficients."""

    nvars: int
    terms: dict[Monomial, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, coef in self.terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars:
                raise DimensionMismatch(
                    f"monomial {mono} has {len(mono)} exponents, expected {self.nvars}"
                )
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = float(coef)
            if c != 0.0:
                clean[mono] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for nvars={nvars}")
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1.0})

    # -- basic queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_degree(self) -> int:
        """Common total degree of all monomials.

        The zero polynomial reports degree 0.  Raises NotHomogeneous with an
        offending monomial pair otherwise.
        """
        degs = {}
        for mono in self.terms:
            degs.setdefault(sum(mono), mono)
            if len(degs) > 1:
                (d1, m1), (d2, m2) = sorted(degs.items())[:2]
                raise NotHomogeneous(
                    f"mixed degrees: {m1} (degree {d1}) vs {m2} (degree {d2})"
                )
        return next(iter(degs)) if degs else 0

    def is_homogeneous(self) -> bool:
        try:
            self.homogeneous_degree()
            return True
        except NotHomogeneous:
            return False

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.nvars != other.nvars:
            raise DimensionMismatch("adding polynomials over different variables")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0.0) + c
        return Polynomial(self.nvars, terms)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial(self.nvars, {m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        if self.nvars != other.nvars:
            raise DimensionMismatch("multiplying polynomials over different variables")
        terms: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(m1, m2))
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    # -- evaluation and calculus ----------------------------------------------

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.nvars,):
            raise DimensionMismatch(
                f"point has shape {x.shape}, expected ({self.nvars},)"
            )
        total = 0.0
        for mono, c in self.terms.items():
            t = c
            for j, e in enumerate(mono):
                if e:
                    t *= x[j] ** e
            total += t
        return total

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        from . import _kernels

        points = np.ascontiguousarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.nvars:
            raise DimensionMismatch("points must be (npoints, nvars)")
        exps, coefs = self.to_arrays()
        return _kernels.eval_many(exps, coefs, points)

    def partial(self, j: int) -> "Polynomial":
        if not 0 <= j < self.nvars:
            raise IndexError(f"variable index {j} out of range")
        terms = {}
        for mono, c in self.terms.items():
            e = mono[j]
            if e:
                key = mono[:j] + (e - 1,) + mono[j + 1 :]
                terms[key] = terms.get(key, 0.0) + c * e
        return Polynomial(self.nvars, terms)

    def gradient(self) -> list["Polynomial"]:
        return [self.partial(j) for j in range(self.nvars)]

    # -- structural operations -------------------------------------------------

    def substitute_squares(self) -> "Polynomial":
        """Return q with q(y) = p(y_1**2, ..., y_n**2): every exponent doubles."""
        return Polynomial(
            self.nvars,
            {tuple(2 * e for e in m): c for m, c in self.terms.items()},
        )

    def multiply_norm_power(self, d: int) -> "Polynomial":
        """Multiply by (sum_i x_i**2)**d."""
        if d < 0:
            raise ValueError("power must be nonnegative")
        out = self
        norm_sq = norm_sq_poly(self.nvars)
        for _ in range(d):
            out = out * norm_sq
        return out

    def restrict_to_face(self, i: int) -> "Polynomial":
        """Substitute x_i = 0 (drops monomials with positive exponent in x_i)."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"face index {i} out of range for nvars={self.nvars}")
        return Polynomial(
            self.nvars, {m: c for m, c in self.terms.items() if m[i] == 0}
        )

    def drop_variable(self, i: int) -> "Polynomial":
        """Remove variable i; only valid when no stored monomial uses it."""
        for m in self.terms:
            if m[i] != 0:
                raise ValueError(f"monomial {m} still uses variable {i}")
        return Polynomial(
            self.nvars - 1, {m[:i] + m[i + 1 :]: c for m, c in self.terms.items()}
        )

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (exps, coefs) arrays in graded-lex order, for the kernels."""
        monos = sorted(self.terms, key=grlex_key)
        if not monos:
            exps = np.zeros((1, self.nvars), dtype=np.int64)
            coefs = np.zeros(1)
            return exps, coefs
        exps = np.array(monos, dtype=np.int64).reshape(len(monos), self.nvars)
        coefs = np.array([self.terms[m] for m in monos])
        return exps, coefs

    def to_symmetric_tensor(self) -> "SymmetricTensor":
        """Canonical symmetric form G with G[x, ..., x] = p(x).

        Requires a homogeneous polynomial of degree >= 1.
        """
        d = self.homogeneous_degree()
        if self.terms and d < 1:
            raise NotHomogeneous("tensor form needs degree >= 1")
        if not self.terms:
            raise NotHomogeneous("tensor form of the zero polynomial is undefined; "
                                 "use dense_tensor for a zero form of known degree")
        entries = {}
        for mono, c in self.terms.items():
            idx = []
            for j, e in enumerate(mono):
                idx.extend([j] * e)
            entries[tuple(idx)] = c / multinomial(mono)
        return SymmetricTensor(order=d, dim=self.nvars, entries=entries)

    def dense_tensor(self, degree: int | None = None) -> np.ndarray:
        """Flat dense symmetric tensor of shape (nvars**degree,).

        The coefficient of each monomial is spread evenly over all index
        permutations.  ``degree`` may be given explicitly so that the zero
        polynomial can be embedded at a known order.
        """
        d = self.homogeneous_degree() if degree is None else degree
        if self.terms and self.homogeneous_degree() != d:
            raise NotHomogeneous(f"polynomial is not homogeneous of degree {d}")
        n = self.nvars
        out = np.zeros(n**d)
        strides = np.array([n ** (d - 1 - t) for t in range(d)], dtype=np.int64)
        for mono, c in self.terms.items():
            idx = []
            for j, e in enumerate(mono):
                idx.extend([j] * e)
            w = c / multinomial(mono)
            for perm in _distinct_permutations(tuple(idx)):
                out[int(np.dot(strides, perm))] = w
        return out

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        monos = sorted(self.terms, key=grlex_key)
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(m), "coef": self.terms[m]} for m in monos],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polynomial":
        nvars = int(data["nvars"])
        terms = {}
        for entry in data["terms"]:
            mono = tuple(int(e) for e in entry["exp"])
            terms[mono] = terms.get(mono, 0.0) + float(entry["coef"])
        return cls(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for m in sorted(self.terms, key=grlex_key):
            mono = "*".join(
                f"x{j + 1}^{e}" if e > 1 else f"x{j + 1}"
                for j, e in enumerate(m)
                if e
            )
            bits.append(f"{self.terms[m]:g}*{mono}" if mono else f"{self.terms[m]:g}")
        return "Polynomial(" + " + ".join(bits) + ")"


def norm_sq_poly(nvars: int) -> Polynomial:
    """The polynomial sum_i x_i**2."""
    return Polynomial(nvars, {tuple(2 if j == i else 0 for j in range(nvars)): 1.0
                              for i in range(nvars)})


@dataclass(frozen=True)
class SymmetricTensor:
    """Order-d symmetric multilinear form over R^dim, canonical sparse storage.

    ``entries`` is keyed by sorted index tuples; looking up any permutation of
    a tuple returns the canonical entry.
    """

    order: int
    dim: int
    entries: dict[tuple[int, ...], float]

    def get(self, idx: tuple[int, ...]) -> float:
        if len(idx) != self.order:
            raise DimensionMismatch(f"index tuple must have length {self.order}")
        return self.entries.get(tuple(sorted(idx)), 0.0)

    def apply(self, args) -> float:
        """Multilinear application G[q_1, ..., q_d]."""
        if len(args) != self.order:
            raise DimensionMismatch(
                f"expected {self.order} argument vectors, got {len(args)}"
            )
        vecs = [np.asarray(a, dtype=float) for a in args]
        for v in vecs:
            if v.shape != (self.dim,):
                raise DimensionMismatch(
                    f"argument has shape {v.shape}, expected ({self.dim},)"
                )
        total = 0.0
        for idx, value in self.entries.items():
            perm_sum = 0.0
            for perm in _distinct_permutations(idx):
                prod = 1.0
                for k, i in enumerate(perm):
                    prod *= vecs[k][i]
                perm_sum += prod
            total += value * perm_sum
        return total

    def contract_all(self, x) -> float:
        """G[x, x, ..., x]; reproduces the generating polynomial."""
        return self.apply([x] * self.order)
