import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copolyap.poly import (
    DimensionMismatch,
    NotHomogeneous,
    Polynomial,
    monomials_of_degree,
    multinomial,
    norm_sq_poly,
)

QUAD = Polynomial(2, {(2, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0})
CUBIC = Polynomial(2, {(3, 0): 1.0, (1, 2): 1.5, (2, 1): 1.5, (0, 3): 0.5})


def random_homogeneous(rng, n, d):
    monos = monomials_of_degree(n, d)
    coefs = rng.uniform(-2, 2, len(monos))
    return Polynomial(n, dict(zip(monos, coefs)))


# -- evaluation ---------------------------------------------------------------


def test_eval_quadratic():
    assert QUAD.eval([1.0, 1.0]) == pytest.approx(3.0)


def test_eval_zero_polynomial():
    z = Polynomial.zero(3)
    assert z.eval([4.0, -1.0, 7.0]) == 0.0


def test_eval_cubic_hand_expansion():
    # 1*1 + 1.5*1*4 + 1.5*2*1 + 0.5*8 = 1 + 6 + 3 + 4
    assert CUBIC.eval([1.0, 2.0]) == pytest.approx(14.0)


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        QUAD.eval([1.0, 2.0, 3.0])


def test_eval_many_matches_eval():
    rng = np.random.default_rng(0)
    p = random_homogeneous(rng, 3, 4)
    pts = rng.uniform(-1, 1, (50, 3))
    batch = p.eval_many(pts)
    for k in range(50):
        assert batch[k] == pytest.approx(p.eval(pts[k]), abs=1e-12)


# -- gradient -----------------------------------------------------------------


def test_gradient_quadratic():
    gx, gy = QUAD.gradient()
    assert gx.terms == {(1, 0): 2.0, (0, 1): 1.0}
    assert gy.terms == {(1, 0): 1.0, (0, 1): 2.0}


def test_gradient_constant_is_zero():
    c = Polynomial.constant(2, 5.0)
    assert all(g.is_zero() for g in c.gradient())


def test_gradient_power_rule():
    p = Polynomial(2, {(3, 0): 1.0})
    gx, gy = p.gradient()
    assert gx.terms == {(2, 0): 3.0}
    assert gy.is_zero()


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    p = random_homogeneous(rng, 3, 3)
    grad = p.gradient()
    step = 1e-6
    for _ in range(10):
        x = rng.uniform(0.2, 1.5, 3)
        v = rng.uniform(-1, 1, 3)
        fd = (p.eval(x + step * v) - p.eval(x - step * v)) / (2 * step)
        analytic = sum(g.eval(x) * v[j] for j, g in enumerate(grad))
        assert fd == pytest.approx(analytic, abs=1e-4 * (1 + abs(analytic)))


# -- homogeneity --------------------------------------------------------------


def test_homogeneous_degree():
    assert QUAD.homogeneous_degree() == 2
    assert CUBIC.homogeneous_degree() == 3


def test_mixed_degree_reports_offending_pair():
    p = Polynomial(2, {(2, 0): 1.0, (0, 1): 1.0})
    with pytest.raises(NotHomogeneous, match="degree"):
        p.homogeneous_degree()


@settings(max_examples=50, derandomize=True)
@given(
    st.floats(min_value=0.01, max_value=10.0),
    st.integers(min_value=0, max_value=2**16),
)
def test_homogeneous_scaling(lam, seed):
    rng = np.random.default_rng(seed)
    p = random_homogeneous(rng, 2, 3)
    x = rng.uniform(-1, 1, 2)
    lhs = p.eval(lam * x)
    rhs = lam**3 * p.eval(x)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))


# -- symmetric tensor ---------------------------------------------------------


def test_tensor_quadratic_entries():
    G = QUAD.to_symmetric_tensor()
    assert G.get((0, 0)) == pytest.approx(1.0)
    assert G.get((0, 1)) == pytest.approx(0.5)
    assert G.get((1, 0)) == pytest.approx(0.5)  # permutation lookup
    assert G.get((1, 1)) == pytest.approx(1.0)


def test_tensor_single_monomial():
    p = Polynomial(2, {(0, 3): 1.0})
    G = p.to_symmetric_tensor()
    assert G.entries == {(1, 1, 1): 1.0}


def test_tensor_cubic_entries():
    G = CUBIC.to_symmetric_tensor()
    assert G.get((0, 0, 0)) == pytest.approx(1.0)
    assert G.get((0, 0, 1)) == pytest.approx(0.5)  # 1.5 over 3 permutations
    assert G.get((0, 1, 1)) == pytest.approx(0.5)
    assert G.get((1, 1, 1)) == pytest.approx(0.5)


def test_tensor_apply_offdiagonal():
    G = QUAD.to_symmetric_tensor()
    e1, e2 = np.eye(2)
    assert G.apply([e1, e2]) == pytest.approx(0.5)


def test_tensor_apply_zero_argument():
    G = CUBIC.to_symmetric_tensor()
    assert G.apply([np.zeros(2), np.ones(2), np.ones(2)]) == 0.0


def test_tensor_apply_cubic_entry_lookup():
    G = CUBIC.to_symmetric_tensor()
    e1, e2 = np.eye(2)
    assert G.apply([e1, e1, e2]) == pytest.approx(0.5)


def test_tensor_diagonal_reproduces_eval():
    rng = np.random.default_rng(2)
    p = random_homogeneous(rng, 3, 4)
    G = p.to_symmetric_tensor()
    for _ in range(5):
        x = rng.uniform(-1, 1, 3)
        v = p.eval(x)
        assert G.contract_all(x) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_tensor_apply_permutation_invariant():
    rng = np.random.default_rng(3)
    p = random_homogeneous(rng, 2, 3)
    G = p.to_symmetric_tensor()
    args = [rng.uniform(-1, 1, 2) for _ in range(3)]
    ref = G.apply(args)
    assert G.apply([args[2], args[0], args[1]]) == pytest.approx(ref)
    assert G.apply([args[1], args[2], args[0]]) == pytest.approx(ref)


def test_tensor_apply_matches_polarization():
    # independent oracle: G[q1..qd] = (1/d!) sum_{S subset [d]} (-1)^(d-|S|) p(sum_S q)
    from itertools import combinations
    from math import factorial

    rng = np.random.default_rng(4)
    p = random_homogeneous(rng, 2, 4)
    G = p.to_symmetric_tensor()
    args = [rng.uniform(-1, 1, 2) for _ in range(4)]
    total = 0.0
    for size in range(5):
        for subset in combinations(range(4), size):
            s = np.zeros(2)
            for k in subset:
                s = s + args[k]
            total += (-1) ** (4 - size) * p.eval(s)
    oracle = total / factorial(4)
    assert G.apply(args) == pytest.approx(oracle, abs=1e-10)


def test_tensor_rejects_nonhomogeneous():
    p = Polynomial(2, {(2, 0): 1.0, (1, 0): 1.0})
    with pytest.raises(NotHomogeneous):
        p.to_symmetric_tensor()


def test_tensor_apply_arity_and_dimension_checked():
    G = QUAD.to_symmetric_tensor()
    with pytest.raises(DimensionMismatch):
        G.apply([np.ones(2)])  # wrong arity
    with pytest.raises(DimensionMismatch):
        G.apply([np.ones(3), np.ones(3)])  # wrong dimension


# -- squares substitution and norm lift ---------------------------------------


def test_substitute_squares_quadratic():
    q = QUAD.substitute_squares()
    assert q.terms == {(4, 0): 1.0, (2, 2): 1.0, (0, 4): 1.0}


def test_substitute_squares_single_variable():
    p = Polynomial(2, {(1, 0): 1.0})
    assert p.substitute_squares().terms == {(2, 0): 1.0}


def test_substitute_squares_pointwise():
    rng = np.random.default_rng(5)
    p = random_homogeneous(rng, 3, 3)
    q = p.substitute_squares()
    for _ in range(10):
        y = rng.uniform(-1.5, 1.5, 3)
        assert q.eval(y) == pytest.approx(p.eval(y**2), rel=1e-12, abs=1e-12)


def test_multiply_norm_power_identity():
    assert QUAD.multiply_norm_power(0).terms == QUAD.terms


def test_multiply_norm_power_sum_of_cubes():
    # (a + b)(a^2 - ab + b^2) = a^3 + b^3 with a = y1^2, b = y2^2
    p = Polynomial(2, {(4, 0): 1.0, (2, 2): -1.0, (0, 4): 1.0})
    lifted = p.multiply_norm_power(1)
    assert lifted.terms == {(6, 0): 1.0, (0, 6): 1.0}


def test_multiply_norm_power_constant():
    p = Polynomial.constant(2, 1.0)
    assert p.multiply_norm_power(1).terms == {(2, 0): 1.0, (0, 2): 1.0}


# -- face restriction ----------------------------------------------------------


def test_restrict_to_face_quadratic():
    assert QUAD.restrict_to_face(0).terms == {(0, 2): 1.0}


def test_restrict_to_face_annihilates_multiples():
    q = Polynomial(2, {(1, 1): 3.0, (2, 0): -1.0})  # x1 * (3 x2 - x1)
    assert q.restrict_to_face(0).is_zero()


def test_restrict_to_face_cubic():
    assert CUBIC.restrict_to_face(1).terms == {(3, 0): 1.0}


def test_restrict_to_face_out_of_range():
    with pytest.raises(IndexError):
        QUAD.restrict_to_face(2)


# -- serialization -------------------------------------------------------------


def test_json_round_trip():
    data = CUBIC.to_json()
    back = Polynomial.from_json(data)
    assert back.terms == CUBIC.terms
    assert back.nvars == 2


def test_json_graded_lex_order_and_no_zeros():
    p = Polynomial(2, {(0, 2): 1.0, (2, 0): 2.0, (1, 1): 0.0, (1, 0): 3.0})
    data = p.to_json()
    exps = [tuple(t["exp"]) for t in data["terms"]]
    assert exps == [(1, 0), (0, 2), (2, 0)]
    assert all(t["coef"] != 0.0 for t in data["terms"])


def test_zero_coefficients_dropped_on_construction():
    p = Polynomial(2, {(1, 0): 0.0, (0, 1): 1.0})
    assert (1, 0) not in p.terms


def test_multinomial():
    assert multinomial((2, 0)) == 1
    assert multinomial((1, 1)) == 2
    assert multinomial((2, 1)) == 3
    assert multinomial((1, 1, 1)) == 6


def test_norm_sq_poly():
    assert norm_sq_poly(3).eval([1.0, 2.0, 3.0]) == pytest.approx(14.0)


def test_arithmetic_mul_scale():
    p = Polynomial(2, {(1, 0): 1.0})
    q = Polynomial(2, {(0, 1): 1.0})
    assert (p * q).terms == {(1, 1): 1.0}
    assert (2.0 * p).terms == {(1, 0): 2.0}
    assert (p - p).is_zero()
