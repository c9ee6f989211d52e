"""Copositive polynomial Lyapunov certificates for complementarity dynamics
on the nonnegative orthant: two LP synthesis hierarchies, an independent
verifier, a complementarity multiplier solver and a projected time-stepping
simulator.
"""

from ._kernels import BACKEND
from .cone import FaceDescriptor, OrthantCone, project
from .comp import LccpSolution, LcpProblem, solve_lcp_enumeration, solve_multiplier
from .disc import DiscOptions, SynthResult
from .disc import synthesize as synthesize_disc
from .lp import LpOutcome, LpProblem, LpStatus
from .lp import solve as solve_lp
from .poly import Monomial, Polynomial, SymmetricTensor
from .polya import PolyaOptions
from .polya import synthesize as synthesize_polya
from .sim import Trajectory, evaluate_along, simulate, step
from .simplex import Simplex, SimplicialPartition, standard_partition, standard_simplex
from .synth import Certificate, CoefficientTemplate, ProblemSpec, assemble_V, linear_problem
from .verify import (
    VerificationReport,
    check_copositive_polya,
    check_copositive_tensor,
    sample_decrease_check,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Certificate",
    "CoefficientTemplate",
    "DiscOptions",
    "FaceDescriptor",
    "LccpSolution",
    "LcpProblem",
    "LpOutcome",
    "LpProblem",
    "LpStatus",
    "Monomial",
    "OrthantCone",
    "Polynomial",
    "PolyaOptions",
    "ProblemSpec",
    "Simplex",
    "SimplicialPartition",
    "SymmetricTensor",
    "SynthResult",
    "Trajectory",
    "VerificationReport",
    "assemble_V",
    "check_copositive_polya",
    "check_copositive_tensor",
    "evaluate_along",
    "linear_problem",
    "project",
    "sample_decrease_check",
    "simulate",
    "solve_lcp_enumeration",
    "solve_lp",
    "solve_multiplier",
    "standard_partition",
    "standard_simplex",
    "step",
    "synthesize_disc",
    "synthesize_polya",
    "verify_certificate",
]
