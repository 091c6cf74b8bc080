"""Second moments of passage times, the tau vector, and Kemeny's constant."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .chain import StochasticChain
from .errors import NotIn15a, RouteDisagreement
from .ginverse import GInverse, check_condition1, classify, fundamental_matrix, from_matrix
from .matrix_core import as_matrix, as_vector, frozen, solve_linear
from .passage import _delta, mfpt_direct

ROUTE_TOL = 1e-8
KEMENY_ROW_TOL = 1e-9


@dataclass(frozen=True)
class SecondMoments:
    Md2: np.ndarray
    M2: np.ndarray | None = None


class KemenyRoute(str, enum.Enum):
    DEFINITION = "definition"
    GENERAL_G = "general_g"
    TRACE_15A = "trace_15a"
    DELTA_SUM = "delta_sum"


@dataclass(frozen=True)
class KemenyConstant:
    value: float
    route: KemenyRoute
    row_spread: float | None = None


def _ensure_ginverse(chain, ginv) -> GInverse:
    if ginv is None:
        return fundamental_matrix(chain)
    if isinstance(ginv, GInverse):
        return ginv
    return from_matrix(chain, ginv)


def _agree(routes: dict[str, np.ndarray], what: str, tol: float = ROUTE_TOL) -> None:
    names = list(routes)
    ref = routes[names[0]]
    scale = max(1.0, float(np.max(np.abs(ref))))
    for name in names[1:]:
        gap = float(np.max(np.abs(routes[name] - ref))) / scale
        if gap > tol:
            raise RouteDisagreement(f"{what}: route {name} differs from {names[0]} by {gap:.3e}", discrepancy=gap)


def second_moment_diag_from_tau(pi, tau) -> np.ndarray:
    """``m_jj^(2) = (2 tau_j - 1) / pi_j``."""
    pi = as_vector(pi)
    tau = as_vector(tau, pi.size)
    return (2.0 * tau - 1.0) / pi


def second_moment_diag_from_M(chain: StochasticChain, M) -> np.ndarray:
    """``M_d^(2) = 2 D (Pi M)_d - D``."""
    M = as_matrix(M, square=True)
    d = 1.0 / chain.pi
    return 2.0 * d * (chain.pi @ M) - d


def second_moment_diag_routes(chain: StochasticChain, ginv) -> dict[str, np.ndarray]:
    """Every g-inverse route that applies to ``ginv``, keyed by route name.

    The general sandwich form always appears; the 5a/5b/5 specializations are
    added according to the inverse's class.
    """
    g = _ensure_ginverse(chain, ginv)
    G = g.G
    cls = classify(chain, g)
    pi = chain.pi
    d = 1.0 / pi
    Gd = np.diag(G)
    Q = np.eye(chain.m) - chain.Pi
    routes = {"general": d + 2.0 * d * np.diag(Q @ G @ Q) * d}
    if cls.c5a:
        routes["row_constant"] = d + 2.0 * d * Gd * d - 2.0 * d * (pi @ G) * d
    if cls.c5b:
        routes["column_constant"] = d + 2.0 * d * Gd * d - 2.0 * d * (G.sum(axis=1) * pi) * d
    if cls.c5:
        routes["commuting"] = 2.0 * d * Gd * d - (1.0 + 2.0 * g.params.gamma) * d
    return routes


def second_moment_diag_from_ginverse(chain: StochasticChain, ginv=None) -> np.ndarray:
    """Diagonal second moments ``m_jj^(2)`` of the recurrence times.

    Returns the tightest applicable specialization after checking that every
    route, plus the tau route through ``mfpt_direct``, agrees.
    """
    routes = second_moment_diag_routes(chain, ginv)
    tau = chain.pi @ mfpt_direct(chain).M
    routes["tau"] = second_moment_diag_from_tau(chain.pi, tau)
    _agree(routes, "second moments of recurrence times")
    for label in ("commuting", "column_constant", "row_constant", "general"):
        if label in routes:
            return routes[label]


def second_moment_matrix(chain: StochasticChain, M, Md2) -> np.ndarray:
    """Full matrix ``M^(2)`` from ``(I-P) M2 = E + 2P(M - M_d) - P M2_d``.

    Each column is solved with its diagonal entry pinned to ``Md2``; the
    left-over equation for that row is then used as a consistency check.
    """
    M = as_matrix(M, square=True)
    m = chain.m
    Md2 = as_vector(Md2, m)
    P = chain.P
    rhs = np.ones((m, m)) + 2.0 * P @ (M - np.diag(np.diag(M))) - P * Md2[None, :]
    M2 = np.empty((m, m))
    for j in range(m):
        others = np.r_[0:j, j + 1:m]
        M2[j, j] = Md2[j]
        if others.size:
            A = np.eye(m - 1) - P[np.ix_(others, others)]
            b = rhs[others, j] + P[others, j] * Md2[j]
            M2[others, j] = solve_linear(A, b)
    lhs = (np.eye(m) - P) @ M2
    gap = float(np.max(np.abs(lhs - rhs))) / max(1.0, float(np.max(np.abs(M2))))
    if gap > ROUTE_TOL:
        raise RouteDisagreement(f"pinned diagonal is inconsistent with the moment equation ({gap:.3e})", gap)
    return frozen(M2)


def second_moments(chain: StochasticChain, full: bool = True) -> SecondMoments:
    M = mfpt_direct(chain).M
    Md2 = second_moment_diag_from_M(chain, M)
    return SecondMoments(Md2=frozen(Md2), M2=second_moment_matrix(chain, M, Md2) if full else None)


def tau_routes(chain: StochasticChain, ginv) -> dict[str, np.ndarray]:
    g = _ensure_ginverse(chain, ginv)
    G = g.G
    cls = classify(chain, g)
    pi = chain.pi
    m = chain.m
    e = np.ones(m)
    E = np.ones((m, m))
    D = np.diag(1.0 / pi)
    diag = lambda X: np.diag(np.diag(X))  # noqa: E731
    Pi = chain.Pi
    row = G.sum(axis=1)
    piG = pi @ G
    routes = {
        "general_matrix": e + (pi @ G @ e) * e - diag(Pi @ G) @ D @ e - diag(G @ E) @ e + diag(G) @ D @ e,
        "general_elementwise": np.array([1.0 + pi @ row - row[j] + (G[j, j] - piG[j]) / pi[j] for j in range(m)]),
    }
    if cls.c5a:
        routes["row_constant_matrix"] = e - diag(Pi @ G) @ D @ e + diag(G) @ D @ e
        routes["row_constant_elementwise"] = np.array([1.0 + (G[j, j] - piG[j]) / pi[j] for j in range(m)])
    if cls.c5b:
        routes["column_constant_matrix"] = e - diag(G @ E) @ e + diag(G) @ D @ e
        routes["column_constant_elementwise"] = np.array([1.0 - row[j] + G[j, j] / pi[j] for j in range(m)])
    if cls.c5:
        routes["commuting"] = diag(G) @ D @ e - g.params.gamma * e
    return routes


def tau_from_ginverse(chain: StochasticChain, ginv=None) -> np.ndarray:
    """``tau_j = sum_i pi_i m_ij`` through ``ginv``, checked against ``pi^T M``."""
    routes = tau_routes(chain, ginv)
    routes["direct"] = chain.pi @ mfpt_direct(chain).M
    _agree(routes, "tau")
    for label in ("commuting", "column_constant_elementwise", "row_constant_elementwise", "general_elementwise"):
        if label in routes:
            return routes[label]


def ginverse_from_second_moments(chain: StochasticChain, gamma: float, M, Md2) -> np.ndarray:
    """Entries of ``G(e, pi, gamma)`` from pi, M and the recurrence second moments."""
    M = as_matrix(M, square=True)
    Md2 = as_vector(Md2, chain.m)
    pi = chain.pi
    off = 1.0 - np.eye(chain.m)
    common = gamma + (pi * Md2 + 1.0) / 2.0
    return pi[None, :] * (common[None, :] - off * M)


def group_inverse_from_second_moments(M, Md2) -> np.ndarray:
    """``a#_ij = (m2_jj / m_jj^2 - 1/m_jj)/2 - pi_j m_ij [i != j]``, with pi_j = 1/m_jj."""
    M = as_matrix(M, square=True)
    mjj = np.diag(M)
    Md2 = as_vector(Md2, mjj.size)
    off = 1.0 - np.eye(mjj.size)
    return 0.5 * (Md2 / mjj**2 - 1.0 / mjj)[None, :] - off * M / mjj[None, :]


def kemeny_constant(chain: StochasticChain, route=KemenyRoute.DEFINITION, ginv=None) -> KemenyConstant:
    """Kemeny's constant ``K = sum_j pi_j m_ij`` by the requested route.

    ``ginv`` feeds the g-inverse routes (default: the fundamental matrix);
    ``delta_sum`` uses its ``beta`` parameter.
    """
    route = KemenyRoute(route)
    pi = chain.pi
    if route is KemenyRoute.DEFINITION:
        rows = mfpt_direct(chain).M @ pi
        spread = float(rows.max() - rows.min())
        if spread > KEMENY_ROW_TOL * max(1.0, float(rows.max())):
            raise RouteDisagreement(f"sum_j pi_j m_ij varies with i by {spread:.3e}", discrepancy=spread)
        return KemenyConstant(float(rows[0]), route, spread)
    g = _ensure_ginverse(chain, ginv)
    G = g.G
    if route is KemenyRoute.GENERAL_G:
        check_condition1(chain, G)
        value = 1.0 + float(np.sum(np.diag(G) - G.sum(axis=1) * pi))
    elif route is KemenyRoute.TRACE_15A:
        if not classify(chain, g).c5a:
            raise NotIn15a("the trace route needs a g-inverse in A{1, 5a}")
        value = float(np.trace(G)) - g.params.gamma
    else:
        M = mfpt_direct(chain).M
        value = 1.0 + float(pi @ _delta(M, g.params.beta))
    return KemenyConstant(value, route)


def kemeny_all_routes(chain: StochasticChain, ginv=None) -> dict[str, float]:
    g = _ensure_ginverse(chain, ginv)
    out = {}
    for route in KemenyRoute:
        if route is KemenyRoute.TRACE_15A and not classify(chain, g).c5a:
            continue
        out[route.value] = kemeny_constant(chain, route, g).value
    return out
