import numpy as np
import pytest

import copolyap as cp
from copolyap import lp as lpmod
from copolyap.disc import DiscOptions, assemble_constraints, synthesize
from copolyap.poly import Polynomial
from copolyap.simplex import standard_partition
from copolyap.synth import CoefficientTemplate, build_s0, make_template
from copolyap.verify import check_copositive_tensor

QUAD = Polynomial(2, {(2, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0})


def test_options_validate_delta():
    assert DiscOptions(delta_min=2.0**-4).max_level == 4
    with pytest.raises(ValueError):
        DiscOptions(delta_min=0.3)
    with pytest.raises(ValueError):
        DiscOptions(mode="bogus")


def test_assemble_counts_level0():
    # degree-2 template, one cell with two vertices: 3 tuple rows + 1 normalization
    h = make_template(2, 2)
    part = standard_partition(2, 0)
    problem = assemble_constraints(h, part)
    assert len(problem.constraints) == 4
    rels = [rel for _, rel, _ in problem.constraints]
    assert rels.count(lpmod.EQ) == 1


def test_assemble_fixed_h_constraint_values():
    # for the fixed quadratic the three tuple values are 1, 0.5, 1
    h = CoefficientTemplate.from_polynomial(QUAD)
    part = standard_partition(2, 0)
    problem = assemble_constraints(h, part)
    tuple_rows = [(row, rhs) for row, rel, rhs in problem.constraints if rel == lpmod.GE]
    values = sorted(-rhs for _, rhs in tuple_rows)
    assert values == pytest.approx([0.5, 1.0, 1.0])


def test_assemble_zero_template_infeasible():
    empty = CoefficientTemplate.zero(2, 0)
    part = standard_partition(2, 0)
    problem = assemble_constraints(empty, part)
    assert lpmod.solve(problem).status == lpmod.LpStatus.INFEASIBLE


def test_tuple_count_grows_with_degree():
    h = make_template(2, 4)
    part = standard_partition(2, 0)
    problem = assemble_constraints(h, part)
    # C(2 + 4 - 1, 4) = 5 multisets + normalization
    assert len(problem.constraints) == 6


def test_synthesizes_stable_2d(stable2d):
    result = synthesize(stable2d, DiscOptions())
    assert result.found
    cert = result.certificate
    assert cert.params["degree"] == 2
    assert cert.params["level"] == 0
    assert cert.r == 0
    assert cert.method == "disc"


def test_known_quadratic_feasible_at_level0(stable2d):
    # the known certificate numerator satisfies the level-0 constraint system
    h = make_template(2, 2)
    s0 = build_s0(h, stable2d.field, 0)
    from copolyap.disc import _build_face_blocks

    part = standard_partition(2, 0)
    blocks = _build_face_blocks(stable2d, h, 0, part, "conservative")
    problem = assemble_constraints(h, part, s0=s0, face_blocks=blocks, margin=1e-6)
    coeffs = np.array([1.0, 1.0, 1.0]) / 3.0  # normalized (x2^2, x1x2, x1^2)
    for row, rel, rhs in problem.constraints:
        value = row @ coeffs
        if rel == lpmod.EQ:
            assert value == pytest.approx(rhs, abs=1e-12)
        else:
            assert value >= rhs - 1e-12


def test_synthesizes_cubic_field(quadfield2d):
    result = synthesize(quadfield2d, DiscOptions())
    assert result.found
    cert = result.certificate
    assert cert.params["degree"] == 3
    assert cert.params["level"] <= 4
    assert check_copositive_tensor(cert.h).certified


def test_negative_control_exhausts(unstable2d):
    result = synthesize(unstable2d, DiscOptions(d_max=3, delta_min=2.0**-3))
    assert not result.found
    assert result.nodes_tried == 4 * 2 + 4 * 1  # levels 0..3, (r0: d2,3), (r1: d3)
    assert not result.skipped


def test_returned_certificates_pass_tensor_recheck(stable2d, quadfield2d):
    for prob in (stable2d, quadfield2d):
        cert = synthesize(prob, DiscOptions()).certificate
        from copolyap.synth import decrease_polynomials

        s0, faces = decrease_polynomials(prob, cert.h, cert.r)
        assert check_copositive_tensor(cert.h).certified
        assert check_copositive_tensor(s0).certified
        for f in faces:
            assert check_copositive_tensor(f).certified


def test_hierarchy_monotone_feasibility(stable2d):
    # a numerator feasible at level k stays feasible at level k+1 (margin 0)
    h = make_template(2, 2)
    s0 = build_s0(h, stable2d.field, 0)
    coeffs = np.array([1.0, 1.0, 1.0]) / 3.0
    for level in range(3):
        part = standard_partition(2, level + 1)
        problem = assemble_constraints(h, part, s0=s0, margin=0.0)
        for row, rel, rhs in problem.constraints:
            if rel == lpmod.GE:
                assert row @ coeffs >= rhs - 1e-12


def test_strictly_copositive_certified_at_finite_level():
    # tuple values of sum x_i^d and of the known quadratic turn nonnegative
    for p in (Polynomial(2, {(3, 0): 1.0, (0, 3): 1.0}), QUAD):
        outcome = check_copositive_tensor(p, max_level=6)
        assert outcome.certified


def test_synthesizes_3d_problem(linear3d):
    result = synthesize(linear3d, DiscOptions(d_max=3, r_max=0, delta_min=2.0**-3))
    assert result.found
    assert result.certificate.h.nvars == 3
    samp = cp.sample_decrease_check(linear3d, result.certificate, num_samples=300)
    assert samp.max_derivative <= 1e-8


def test_sign_split_recovers_inward_face():
    # field enters the cone through face 1; the conservative branch is
    # infeasible but the sign-resolved constraints find a certificate
    prob = cp.linear_problem([[-3.0, 5.0], [-4.0, 1.0]])
    conservative = synthesize(prob, DiscOptions(d_max=4, delta_min=2.0**-4))
    assert not conservative.found
    split = synthesize(
        prob, DiscOptions(d_max=4, delta_min=2.0**-4, mode="sign_split")
    )
    assert split.found
    samp = cp.sample_decrease_check(prob, split.certificate, num_samples=500)
    assert samp.max_derivative <= 1e-8


def test_trace_records_nodes(stable2d):
    result = synthesize(stable2d, DiscOptions())
    assert result.trace[-1]["status"] == "feasible"
