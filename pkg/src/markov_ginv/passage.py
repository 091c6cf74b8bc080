"""Mean first passage times, and g-inverse elements rebuilt from (pi, M).

``mfpt_direct`` solves the first-step equations and is the reference route;
every other route goes through a g-inverse. The ``reconstruct_*`` functions
go the other way: given the stationary vector, the passage-time matrix and
the parameters (alpha, beta, gamma), they rebuild ``G`` entry by entry
without touching any matrix inverse.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import StochasticChain
from .errors import BadBeta, DegenerateParameters, NotIn15a, UnknownCase
from .ginverse import (
    PARAM_TOL,
    GInverse,
    GInverseParams,
    _matrix_of,
    check_condition1,
    classify,
    from_matrix,
)
from .matrix_core import as_matrix, as_vector, diag_part, frozen, solve_linear


@dataclass(frozen=True)
class PassageTimes:
    M: np.ndarray
    chain: StochasticChain

    @property
    def D(self) -> np.ndarray:
        """``M_d``, the diagonal of mean recurrence times ``1/pi_j``."""
        return diag_part(self.M)


@dataclass(frozen=True)
class DerivedVectors:
    delta: np.ndarray
    eta: np.ndarray
    tau: np.ndarray


def mfpt_direct(chain: StochasticChain) -> PassageTimes:
    """Column-wise solve of ``m_ij = 1 + sum_{k != j} p_ik m_kj``."""
    m = chain.m
    P = chain.P
    M = np.empty((m, m))
    for j in range(m):
        others = np.r_[0:j, j + 1:m]
        if others.size:
            A = np.eye(m - 1) - P[np.ix_(others, others)]
            M[others, j] = solve_linear(A, np.ones(m - 1))
        M[j, j] = 1.0 / chain.pi[j]
    return PassageTimes(frozen(M), chain)


def mfpt_from_ginverse(chain: StochasticChain, ginv) -> PassageTimes:
    """``M = [G Pi - E (G Pi)_d + I - G + E G_d] D`` for any g-inverse ``G``."""
    G = _matrix_of(ginv)
    check_condition1(chain, G)
    m = chain.m
    E = np.ones((m, m))
    D = np.diag(1.0 / chain.pi)
    GPi = G @ chain.Pi
    M = (GPi - E @ diag_part(GPi) + np.eye(m) - G + E @ diag_part(G)) @ D
    return PassageTimes(frozen(M), chain)


def mfpt_from_deflated(chain: StochasticChain, ginv) -> PassageTimes:
    """``M = [I - H + E H_d] D`` with ``H = G (I - Pi)``."""
    G = _matrix_of(ginv)
    check_condition1(chain, G)
    m = chain.m
    H = G @ (np.eye(m) - chain.Pi)
    M = (np.eye(m) - H + np.ones((m, m)) @ diag_part(H)) @ np.diag(1.0 / chain.pi)
    return PassageTimes(frozen(M), chain)


def simplified_formula(G, pi) -> np.ndarray:
    """``m_ij = (g_jj - g_ij + delta_ij) / pi_j``, with no class check.

    This reproduces M exactly when ``G`` is in A{1, 5a} and not otherwise.
    """
    G = as_matrix(G, square=True)
    pi = as_vector(pi, G.shape[0])
    return (np.diag(G)[None, :] - G + np.eye(G.shape[0])) / pi[None, :]


def mfpt_simplified_15a(chain: StochasticChain, ginv) -> PassageTimes:
    if not isinstance(ginv, GInverse):
        ginv = from_matrix(chain, ginv)
    if not classify(chain, ginv).c5a:
        raise NotIn15a(f"g-inverse has alpha = {ginv.params.alpha}, not e; the simplified form does not apply")
    return PassageTimes(frozen(simplified_formula(ginv.G, chain.pi)), chain)


def mfpt_elementwise_general(ginv, pi) -> np.ndarray:
    """``m_ij = (g_jj - g_ij + delta_ij)/pi_j + (g_i. - g_j.)`` entry by entry."""
    G = _matrix_of(ginv)
    m = G.shape[0]
    pi = as_vector(pi, m)
    row = G.sum(axis=1)
    M = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            M[i, j] = (G[j, j] - G[i, j] + (i == j)) / pi[j] + (row[i] - row[j])
    return M


def _delta(M, beta) -> np.ndarray:
    # delta_j = sum_{k != j} beta_k m_kj
    return beta @ M - beta * np.diag(M)


def derived_vectors(chain: StochasticChain, M, beta) -> DerivedVectors:
    M = as_matrix(M, square=True)
    beta = as_vector(beta, chain.m)
    if abs(beta.sum() - 1.0) > PARAM_TOL:
        raise BadBeta(f"beta^T e = {beta.sum()!r}, must equal 1")
    m = chain.m
    return DerivedVectors(
        delta=_delta(M, beta),
        eta=(M.sum(axis=0) - np.diag(M)) / m,
        tau=chain.pi @ M,
    )


def _check_inputs(params: GInverseParams, pi, M):
    M = as_matrix(M, square=True)
    m = M.shape[0]
    pi = as_vector(pi, m)
    alpha = as_vector(params.alpha, m)
    beta = as_vector(params.beta, m)
    if abs(pi @ alpha - 1.0) > PARAM_TOL:
        raise DegenerateParameters(f"pi^T alpha = {pi @ alpha!r}, must equal 1")
    if abs(beta.sum() - 1.0) > PARAM_TOL:
        raise DegenerateParameters(f"beta^T e = {beta.sum()!r}, must equal 1")
    if np.max(np.abs(pi * np.diag(M) - 1.0)) > 1e-8:
        raise DegenerateParameters("M is inconsistent with pi: m_jj != 1/pi_j")
    return pi, M, alpha, beta


def row_sums_formula(params: GInverseParams, pi, M) -> np.ndarray:
    """Row sums ``g_i.`` of ``G(alpha, beta, gamma)`` from (pi, M) alone."""
    pi, M, alpha, beta = _check_inputs(params, pi, M)
    pa = pi * alpha
    delta = _delta(M, beta)
    # sum_{k != i} pi_k alpha_k m_ik
    cross = M @ pa - pa * np.diag(M)
    return 1.0 + params.gamma + cross - pa @ delta


def reconstruct_ginverse(params: GInverseParams, pi, M) -> np.ndarray:
    """Entries of ``G(alpha, beta, gamma)`` from the chain's pi and M.

    For i != j: g_ij = pi_j (1 + gamma + delta_j - m_ij + c_i - s),
    for i == j: g_jj = pi_j (1 + gamma + delta_j + c_j - s),
    where c_i = sum_{k != i} pi_k alpha_k m_ik and s = sum_k pi_k alpha_k delta_k.
    """
    pi, M, alpha, beta = _check_inputs(params, pi, M)
    m = M.shape[0]
    pa = pi * alpha
    delta = _delta(M, beta)
    c = M @ pa - pa * np.diag(M)
    s = pa @ delta
    off = 1.0 - np.eye(m)
    inner = 1.0 + params.gamma + delta[None, :] - off * M + c[:, None] - s
    return inner * pi[None, :]


SPECIAL_CASES = ("15a", "125a", "145a", "1245a", "15", "Z", "group", "13", "MP")


def special_case_params(case_id: str, pi, extra_params=None) -> GInverseParams:
    """Full ``(alpha, beta, gamma)`` that a special case fixes or leaves free."""
    extra = dict(extra_params or {})
    pi = as_vector(pi)
    m = pi.size
    e = np.ones(m)
    mp_alpha = pi / (pi @ pi)

    def need(key):
        if key not in extra:
            raise DegenerateParameters(f"case {case_id!r} needs {key!r} in extra_params")
        return extra[key]

    table = {
        "15a": lambda: (e, need("beta"), need("gamma")),
        "125a": lambda: (e, need("beta"), -1.0),
        "145a": lambda: (e, e / m, need("gamma")),
        "1245a": lambda: (e, e / m, -1.0),
        "15": lambda: (e, pi, need("gamma")),
        "Z": lambda: (e, pi, 0.0),
        "group": lambda: (e, pi, -1.0),
        "13": lambda: (mp_alpha, need("beta"), need("gamma")),
        "MP": lambda: (mp_alpha, e / m, -1.0),
    }
    if case_id not in table:
        raise UnknownCase(f"unknown special case {case_id!r}; expected one of {SPECIAL_CASES}")
    alpha, beta, gamma = table[case_id]()
    return GInverseParams(alpha, beta, gamma)


def reconstruct_special(case_id: str, chain: StochasticChain, M, extra_params=None) -> np.ndarray:
    """Element formulas for the named sub-families, each written out in full.

    ``extra_params`` supplies ``beta`` and/or ``gamma`` where the case leaves
    them free (see :data:`SPECIAL_CASES`).
    """
    params = special_case_params(case_id, chain.pi, extra_params)
    pi, M, _, beta = _check_inputs(params, chain.pi, M)
    gamma = params.gamma
    m = chain.m
    off = 1.0 - np.eye(m)
    # every branch below is pi_j * (common_j + row_i - off_ij * m_ij)
    if case_id in ("15a", "125a"):
        delta = _delta(M, beta)
        inner = 1.0 + gamma + delta[None, :] - off * M
    elif case_id in ("145a", "1245a"):
        eta = (M.sum(axis=0) - np.diag(M)) / m
        inner = 1.0 + gamma + eta[None, :] - off * M
    elif case_id in ("15", "Z", "group"):
        tau = pi @ M
        inner = tau[None, :] + gamma - off * M
    else:  # "13", "MP": alpha proportional to pi
        if case_id == "MP":
            d = (M.sum(axis=0) - np.diag(M)) / m
        else:
            d = _delta(M, beta)
        p2 = pi**2
        w = 1.0 / p2.sum()
        c = w * (M @ p2 - p2 * np.diag(M))
        s = w * (p2 @ d)
        inner = 1.0 + gamma + d[None, :] - off * M + c[:, None] - s
    return inner * pi[None, :]
