"""Walsh-function operational-matrix solver for linear stochastic
Volterra-Fredholm integral equations."""

from svfie.basis import (
    Resolution,
    cell_integrals_1d,
    cell_integrals_2d,
    rademacher,
    reconstruct,
    walsh_eval,
    walsh_matrix,
)
from svfie.operational import integration_matrix, stochastic_matrix, walsh_conjugate
from svfie.stochastic import SeedPlan, brownian_path, derive_seed, ito_oracle
from svfie.problems import RegularityConstants, SvfieProblem, registry_get
from svfie.solver import assemble, reconstruct_solution, solve, solve_bpf
from svfie.analysis import convergence_rate, gronwall_bound, l2_error, monte_carlo

__version__ = "0.1.0"

__all__ = [
    "Resolution",
    "RegularityConstants",
    "SeedPlan",
    "SvfieProblem",
    "assemble",
    "brownian_path",
    "cell_integrals_1d",
    "cell_integrals_2d",
    "convergence_rate",
    "derive_seed",
    "gronwall_bound",
    "integration_matrix",
    "ito_oracle",
    "l2_error",
    "monte_carlo",
    "rademacher",
    "reconstruct",
    "reconstruct_solution",
    "registry_get",
    "solve",
    "solve_bpf",
    "stochastic_matrix",
    "walsh_conjugate",
    "walsh_eval",
    "walsh_matrix",
]
