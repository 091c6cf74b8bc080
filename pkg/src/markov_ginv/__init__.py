"""Generalized inverses of the Markovian kernel I - P and what they compute.

Stationary distributions, mean first passage times, recurrence-time second
moments, Kemeny's constant and stationary-vector perturbations for finite
irreducible Markov chains, each available through several independent
routes that are checked against one another.
"""
from .chain import StochasticChain, is_irreducible, stationary_distribution, validate_chain
from .errors import *  # noqa: F401,F403
from .ginverse import (
    ConditionSet,
    GInverse,
    GInverseParams,
    build_base_inverse,
    build_one_condition,
    build_parametric,
    characterize,
    classify,
    deflate,
    fundamental_matrix,
    group_inverse,
    moore_penrose,
    project_to_group_inverse,
)
from .matrix_core import Tolerance, approx_eq, inf_norm, invert, solve_linear
from .moments import (
    KemenyConstant,
    KemenyRoute,
    ginverse_from_second_moments,
    kemeny_constant,
    second_moment_diag_from_ginverse,
    second_moment_diag_from_tau,
    second_moment_matrix,
    tau_from_ginverse,
)
from .passage import (
    DerivedVectors,
    PassageTimes,
    derived_vectors,
    mfpt_direct,
    mfpt_elementwise_general,
    mfpt_from_deflated,
    mfpt_from_ginverse,
    mfpt_simplified_15a,
    reconstruct_ginverse,
    reconstruct_special,
    row_sums_formula,
)
from .perturbation import PerturbationReport, delta_routes, kemeny_bound, n_matrix, perturbed_stationary

__version__ = "0.1.0"
