"""Homogeneous quadratic minimization with up to three indefinite quadratic
constraints, solved through an equivalent min-max eigenvalue problem."""

from ._kernels import BACKEND
from .driver import solve, solve_reduced
from .generator import GeneratorSpec, random_feasible_problem
from .hermitian import (
    EigenPair,
    hermitian_eigh,
    inverse_sqrt_factor,
    min_eigenpair,
    quadratic_form,
    validate_hermitian,
)
from .oracle import OracleEstimate, oracle_cstar, sample_numerical_range, sample_unit_sphere
from .problem import (
    HqcqpProblem,
    InfeasibleError,
    ReducedProblem,
    Solution,
    check_feasible,
    recover,
    reduce_problem,
)
from .search import SearchConfig, SearchError, SearchResult, dichotomous_max, alternating_max, initial_interval
from .solver2 import classify_case, lambda_of_t, solve_one, solve_two
from .solver3 import solve_three

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EigenPair",
    "GeneratorSpec",
    "HqcqpProblem",
    "InfeasibleError",
    "OracleEstimate",
    "ReducedProblem",
    "SearchConfig",
    "SearchError",
    "SearchResult",
    "Solution",
    "alternating_max",
    "check_feasible",
    "classify_case",
    "dichotomous_max",
    "hermitian_eigh",
    "initial_interval",
    "inverse_sqrt_factor",
    "lambda_of_t",
    "min_eigenpair",
    "oracle_cstar",
    "quadratic_form",
    "random_feasible_problem",
    "recover",
    "reduce_problem",
    "sample_numerical_range",
    "sample_unit_sphere",
    "solve",
    "solve_one",
    "solve_reduced",
    "solve_three",
    "solve_two",
    "validate_hermitian",
]
