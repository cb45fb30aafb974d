"""Energy-stable and dual-consistent SBP-SAT discretizations.

The package builds summation-by-parts finite-difference operators with
simultaneous-approximation-term boundary penalties that are provably
energy stable and dual consistent, assembles the resulting semi-discrete
systems, certifies the stability and duality properties numerically, and
reproduces the superconvergent-functional experiments that motivate the
construction.

The top level re-exports the main entry points; the submodules
(:mod:`sbpsat.operators` through :mod:`sbpsat.experiments`) carry the
full surface.
"""

from .assembly import (
    DualityCertificate,
    ProblemSpec,
    SemiDiscreteSystem,
    assemble_parabolic,
    certify,
)
from .errors import SbpsatError
from .experiments import (
    ErrorReport,
    certify_case,
    convergence_study,
    make_preset,
    omega_sweep,
    run_case,
)
from .operators import (
    OperatorOrder,
    SbpOperatorSet,
    build_first_derivative,
    build_second_derivative,
    verify_sbp,
)
from .penalties import (
    BoundaryConditionSpec,
    ParabolicPenalties,
    parabolic_theorem2,
    scalar_penalties,
)
from .solver import TimeIntegratorConfig, integrate, solve_steady

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SbpsatError",
    "OperatorOrder",
    "SbpOperatorSet",
    "build_first_derivative",
    "build_second_derivative",
    "verify_sbp",
    "BoundaryConditionSpec",
    "ParabolicPenalties",
    "parabolic_theorem2",
    "scalar_penalties",
    "ProblemSpec",
    "SemiDiscreteSystem",
    "DualityCertificate",
    "assemble_parabolic",
    "certify",
    "TimeIntegratorConfig",
    "solve_steady",
    "integrate",
    "ErrorReport",
    "make_preset",
    "run_case",
    "certify_case",
    "convergence_study",
    "omega_sweep",
]
