"""Exact change of the stationary vector when ``P`` becomes ``P + E``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .chain import StochasticChain, stationary_distribution, validate_chain
from .errors import InvalidPerturbation, RouteDisagreement
from .ginverse import GInverse, classify, from_matrix, fundamental_matrix, group_inverse
from .matrix_core import DEFAULT_TOL, Tolerance, as_matrix, frozen, inf_norm, solve_linear
from .moments import kemeny_constant
from .passage import mfpt_direct

ROUTE_TOL = 1e-9
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class Perturbation:
    E: np.ndarray
    chain: StochasticChain
    perturbed_chain: StochasticChain


@dataclass(frozen=True)
class PerturbationReport:
    pi_bar: np.ndarray
    delta: np.ndarray
    routes: dict[str, np.ndarray] = field(default_factory=dict)
    lhs: float = 0.0
    bound: float = 0.0
    bound_satisfied: bool = True
    max_discrepancy: float = 0.0


class KemenyBound(NamedTuple):
    bound: float
    lhs: float
    satisfied: bool


def make_perturbation(chain: StochasticChain, E, tol: Tolerance = DEFAULT_TOL) -> Perturbation:
    """Validate ``E`` (zero row sums, ``P + E`` stochastic and irreducible)."""
    E = as_matrix(E, square=True)
    if E.shape != chain.P.shape:
        raise InvalidPerturbation(f"E has shape {E.shape}, chain has {chain.m} states")
    for i, s in enumerate(E.sum(axis=1)):
        if abs(s) > tol.abs + tol.rel:
            raise InvalidPerturbation(f"row {i} of E sums to {s!r}, must be 0", row=i)
    Pbar = chain.P + E
    for i in range(chain.m):
        if np.any(Pbar[i] < -tol.abs):
            raise InvalidPerturbation(f"row {i} of P + E has a negative entry", row=i)
    Pbar = np.clip(Pbar, 0.0, None)
    bar = validate_chain(Pbar, tol)
    # keep E exactly equal to Pbar - P after renormalization
    return Perturbation(frozen(bar.P - chain.P), chain, bar)


def _coerce(chain, E) -> Perturbation:
    return E if isinstance(E, Perturbation) else make_perturbation(chain, E)


def perturbed_stationary(chain: StochasticChain, E) -> np.ndarray:
    """Solve ``pi_bar^T (I - E A#) = pi^T`` and check it against a direct solve."""
    pert = _coerce(chain, E)
    H = group_inverse(chain).G
    x = solve_linear((np.eye(chain.m) - pert.E @ H).T, chain.pi)
    pi_bar = x / x.sum()
    direct = stationary_distribution(pert.perturbed_chain.P)
    gap = float(np.max(np.abs(pi_bar - direct)))
    if gap > ROUTE_TOL:
        raise RouteDisagreement(f"perturbed stationary vector differs from direct solve by {gap:.3e}", gap)
    return pi_bar


def n_matrix(M) -> np.ndarray:
    """``N = (M - M_d) M_d^{-1}``, checked against ``n_ij = (1 - delta_ij) pi_j m_ij``."""
    M = as_matrix(M, square=True)
    Md = np.diag(np.diag(M))
    N = (M - Md) @ np.diag(1.0 / np.diag(M))
    m = M.shape[0]
    elem = np.array([[0.0 if i == j else M[i, j] / M[j, j] for j in range(m)] for i in range(m)])
    gap = float(np.max(np.abs(N - elem)))
    if gap > ROUTE_TOL * max(1.0, float(np.max(np.abs(N)))):
        raise RouteDisagreement(f"N matrix forms disagree by {gap:.3e}", gap)
    return N


def delta_routes(chain: StochasticChain, E, ginv=None, pi_bar=None) -> PerturbationReport:
    """``pi_bar - pi`` by every matrix and element-wise route available for ``ginv``."""
    pert = _coerce(chain, E)
    if ginv is None:
        ginv = fundamental_matrix(chain)
    elif not isinstance(ginv, GInverse):
        ginv = from_matrix(chain, ginv)
    if pi_bar is None:
        pi_bar = perturbed_stationary(chain, pert)
    pi = chain.pi
    m = chain.m
    Eps = pert.E
    G = ginv.G
    H = G @ (np.eye(m) - chain.Pi)
    M = mfpt_direct(chain).M
    Md = np.diag(np.diag(M))
    N = n_matrix(M)
    is5a = classify(chain, ginv).c5a
    row = G.sum(axis=1)

    routes = {
        "deflated": pi_bar @ Eps @ H,
        "passage_times": -pi_bar @ Eps @ (M - Md) @ np.diag(1.0 / np.diag(M)),
        "n_matrix": -pi_bar @ Eps @ N,
    }
    if is5a:
        routes["row_constant"] = pi_bar @ Eps @ G

    # element-wise forms, written as explicit double sums over (i, k)
    d_defl = np.zeros(m)
    d_gen = np.zeros(m)
    d_5a = np.zeros(m)
    d_mfpt = np.zeros(m)
    d_n = np.zeros(m)
    shift = sum(pi_bar[i] * Eps[i, k] * row[k] for i in range(m) for k in range(m))
    for j in range(m):
        for i in range(m):
            for k in range(m):
                w = pi_bar[i] * Eps[i, k]
                d_defl[j] += w * H[k, j]
                d_gen[j] += w * G[k, j]
                if k != j:
                    d_5a[j] += w * (G[k, j] - G[j, j])
                    d_mfpt[j] -= w * M[k, j]
                    d_n[j] -= w * N[k, j]
        d_gen[j] -= pi[j] * shift
        d_mfpt[j] *= pi[j]
    routes["deflated_elementwise"] = d_defl
    routes["general_elementwise"] = d_gen
    if is5a:
        routes["row_constant_elementwise"] = d_5a
    routes["passage_times_elementwise"] = d_mfpt
    routes["n_matrix_elementwise"] = d_n

    delta = pi_bar - pi
    worst = max(float(np.max(np.abs(v - delta))) for v in routes.values())
    if worst > ROUTE_TOL:
        bad = {k: float(np.max(np.abs(v - delta))) for k, v in routes.items()}
        raise RouteDisagreement(f"perturbation routes disagree with pi_bar - pi: {bad}", worst)
    bound = kemeny_bound(chain, pert, pi_bar=pi_bar)
    return PerturbationReport(
        pi_bar=frozen(pi_bar),
        delta=frozen(delta),
        routes={k: frozen(v) for k, v in routes.items()},
        lhs=bound.lhs,
        bound=bound.bound,
        bound_satisfied=bound.satisfied,
        max_discrepancy=worst,
    )


def kemeny_bound(chain: StochasticChain, E, pi_bar=None) -> KemenyBound:
    """``sum_j |pi_j - pi_bar_j| <= (K - 1) ||E||_inf``."""
    pert = _coerce(chain, E)
    if pi_bar is None:
        pi_bar = perturbed_stationary(chain, pert)
    K = kemeny_constant(chain).value
    lhs = float(np.abs(pi_bar - chain.pi).sum())
    bound = (K - 1.0) * inf_norm(pert.E)
    return KemenyBound(bound=bound, lhs=lhs, satisfied=lhs <= bound + BOUND_SLACK)
