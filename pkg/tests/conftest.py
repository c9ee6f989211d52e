import pytest

import copolyap as cp
from copolyap import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit compilation happens once here so timed tests measure the work,
    # not the compiler
    _kernels.warmup()


@pytest.fixture(scope="session")
def stable2d():
    """Linear system stabilized by the constraint (one unstable eigenvalue)."""
    return cp.linear_problem([[-1.0, -2.0], [-1.0, -1.0]])


@pytest.fixture(scope="session")
def unstable2d():
    """Hurwitz matrix destabilized by the constraint (growth on the x2 axis)."""
    return cp.linear_problem([[-1.5, -1.0], [2.0, 1.0]])


@pytest.fixture(scope="session")
def rotation2d():
    return cp.linear_problem([[0.0, 1.0], [-1.0, 0.0]])


@pytest.fixture(scope="session")
def quadfield2d():
    """Homogeneous degree-2 field admitting a cubic certificate."""
    f1 = cp.Polynomial(2, {(2, 0): -1.0, (0, 2): -2.0, (1, 1): 1.0})
    f2 = cp.Polynomial(2, {(2, 0): -1.0, (0, 2): -1.0, (1, 1): 2.0})
    return cp.ProblemSpec(n=2, cone=cp.OrthantCone(2), field=(f1, f2))


@pytest.fixture(scope="session")
def fastoffdiag2d():
    """Stable upper-triangular system with a large off-diagonal term."""
    return cp.linear_problem([[-1.0, 10.0], [0.0, -2.0]])


@pytest.fixture(scope="session")
def linear3d():
    return cp.linear_problem(
        [[-1.0, -3.0, -2.0], [-5.0, 1.0, -1.0], [3.0, -10.0, -2.0]]
    )


@pytest.fixture(scope="session")
def quad_cert_stable2d():
    """Known valid certificate for the stable 2-d system."""
    h = cp.Polynomial(2, {(2, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0})
    return cp.Certificate(h=h, r=0, method="disc")


def assert_poly_close(p, q, tol=1e-9):
    monos = set(p.terms) | set(q.terms)
    for m in monos:
        a = p.terms.get(m, 0.0)
        b = q.terms.get(m, 0.0)
        assert abs(a - b) <= tol * (1 + max(abs(a), abs(b))), (
            f"coefficient of {m}: {a} vs {b}"
        )


@pytest.fixture(scope="session")
def poly_close():
    return assert_poly_close
