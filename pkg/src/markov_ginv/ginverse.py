"""One-condition generalized inverses of the Markovian kernel ``I - P``.

Every such inverse has a unique representation

    G(alpha, beta, gamma) = [I - P + alpha beta^T]^{-1} + gamma e pi^T,
    pi^T alpha = 1,  beta^T e = 1,

and the multi-condition classes A{1, 2}, A{1, 3}, ... are read off from the
parameters. This module builds inverses, recovers their parameters and
classifies them, cross-checking each parameter test against the matrix
condition it stands for.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import StochasticChain
from .errors import (
    ClassificationInconsistent,
    DegenerateParameters,
    MPFormsDisagree,
    NotAGInverse,
    RouteDisagreement,
)
from .matrix_core import as_matrix, as_vector, frozen, inf_norm, invert

PARAM_TOL = 1e-9
CHECK_TOL = 1e-9
GAMMA_TOL = 1e-8
CLASS_TOL = 1e-8
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class GInverseParams:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", frozen(as_vector(self.alpha)))
        object.__setattr__(self, "beta", frozen(as_vector(self.beta, self.alpha.size)))
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True)
class GInverse:
    G: np.ndarray
    params: GInverseParams
    chain: StochasticChain

    @property
    def A(self) -> np.ndarray:
        """``I - (I - P) G``, equal to ``alpha pi^T``."""
        return np.eye(self.chain.m) - self.chain.kernel @ self.G

    @property
    def B(self) -> np.ndarray:
        """``I - G (I - P)``, equal to ``e beta^T``."""
        return np.eye(self.chain.m) - self.G @ self.chain.kernel


@dataclass(frozen=True)
class ConditionSet:
    """Which of the Penrose-type conditions 2-5 (and 5a/5b) an inverse meets."""

    c2: bool
    c3: bool
    c4: bool
    c5a: bool
    c5b: bool

    @property
    def c5(self) -> bool:
        return self.c5a and self.c5b

    def labels(self) -> list[str]:
        flags = [("2", self.c2), ("3", self.c3), ("4", self.c4),
                 ("5a", self.c5a), ("5b", self.c5b), ("5", self.c5)]
        return [name for name, on in flags if on]

    def __contains__(self, name: str) -> bool:
        return name == "1" or name in self.labels()

    def __str__(self):
        return "{" + ", ".join(["1"] + self.labels()) + "}"


def _matrix_of(ginv) -> np.ndarray:
    return ginv.G if isinstance(ginv, GInverse) else as_matrix(ginv, square=True)


def condition1_residual(chain: StochasticChain, G) -> float:
    """``||(I-P) G (I-P) - (I-P)||_inf`` relative to ``max(1, ||G||_inf)``."""
    A = chain.kernel
    G = _matrix_of(G)
    return inf_norm(A @ G @ A - A) / max(1.0, inf_norm(G))


def check_condition1(chain: StochasticChain, G, tol: float = CHECK_TOL) -> None:
    r = condition1_residual(chain, G)
    if r > tol:
        raise NotAGInverse(f"(I-P)G(I-P) != I-P (scaled residual {r:.3e})")


def check_admissible(chain: StochasticChain, alpha, beta, tol: float = PARAM_TOL) -> None:
    if abs(chain.pi @ alpha - 1.0) > tol:
        raise DegenerateParameters(f"pi^T alpha = {chain.pi @ alpha!r}, must equal 1")
    if abs(beta.sum() - 1.0) > tol:
        raise DegenerateParameters(f"beta^T e = {beta.sum()!r}, must equal 1")


def build_base_inverse(chain: StochasticChain, t, u) -> np.ndarray:
    """``[I - P + t u^T]^{-1}``, defined when ``pi^T t != 0`` and ``u^T e != 0``."""
    m = chain.m
    t = as_vector(t, m)
    u = as_vector(u, m)
    pt = float(chain.pi @ t)
    ue = float(u.sum())
    if abs(pt) <= DEGENERACY_TOL:
        raise DegenerateParameters(f"pi^T t = {pt!r}: I - P + t u^T is singular")
    if abs(ue) <= DEGENERACY_TOL:
        raise DegenerateParameters(f"u^T e = {ue!r}: I - P + t u^T is singular")
    W = invert(chain.kernel + np.outer(t, u))
    scale = max(1.0, inf_norm(W))
    r1 = inf_norm(W @ t - chain.e / ue) / scale
    r2 = inf_norm(u @ W - chain.pi / pt) / scale
    if max(r1, r2) > CHECK_TOL:
        raise RouteDisagreement(
            f"base inverse fails its identities: W t vs e/u^Te {r1:.3e}, u^T W vs pi/pi^Tt {r2:.3e}",
            discrepancy=max(r1, r2),
        )
    return W


def characterize(chain: StochasticChain, G) -> GInverseParams:
    """Recover ``(alpha, beta, gamma)`` from a one-condition g-inverse."""
    G = _matrix_of(G)
    check_condition1(chain, G)
    m = chain.m
    e, pi = chain.e, chain.pi
    alpha = (np.eye(m) - chain.kernel @ G) @ e
    beta = pi @ (np.eye(m) - G @ chain.kernel)
    gamma = beta @ G @ alpha - 1.0
    others = (pi @ G @ alpha - 1.0, beta @ G @ e - 1.0)
    scale = max(1.0, inf_norm(G)) * max(1.0, inf_norm(alpha)) * max(1.0, inf_norm(beta))
    worst = max(abs(g - gamma) for g in others)
    if worst > GAMMA_TOL * scale:
        raise RouteDisagreement(f"three evaluations of gamma disagree by {worst:.3e}", discrepancy=worst)
    return GInverseParams(alpha, beta, gamma)


def build_parametric(chain: StochasticChain, params: GInverseParams) -> GInverse:
    alpha = as_vector(params.alpha, chain.m)
    beta = as_vector(params.beta, chain.m)
    check_admissible(chain, alpha, beta)
    G = build_base_inverse(chain, alpha, beta) + params.gamma * chain.Pi
    return GInverse(frozen(G), params, chain)


def build_one_condition(chain: StochasticChain, t, u, f, g) -> GInverse:
    """``[I - P + t u^T]^{-1} + e f^T + g pi^T`` with its parameters attached."""
    f = as_vector(f, chain.m)
    g = as_vector(g, chain.m)
    G = build_base_inverse(chain, t, u) + np.outer(chain.e, f) + np.outer(g, chain.pi)
    check_condition1(chain, G)
    return GInverse(frozen(G), characterize(chain, G), chain)


def from_matrix(chain: StochasticChain, G) -> GInverse:
    """Wrap an arbitrary one-condition g-inverse, computing its parameters."""
    G = as_matrix(G, square=True)
    return GInverse(frozen(G), characterize(chain, G), chain)


def _vec_close(x, target, tol=CLASS_TOL) -> bool:
    scale = max(inf_norm(x), inf_norm(target), 1e-300)
    return inf_norm(x - target) / scale <= tol


def _is_proportional(x, direction, tol=CLASS_TOL) -> bool:
    # least-squares fit of x onto direction, then relative residual
    c = (x @ direction) / (direction @ direction)
    scale = max(inf_norm(x), 1.0)
    return inf_norm(x - c * direction) / scale <= tol


def _matrix_close(X, Y, scale, tol=CLASS_TOL) -> bool:
    return inf_norm(X - Y) <= tol * max(1.0, scale)


def classify(chain: StochasticChain, ginv) -> ConditionSet:
    """Condition classes from the parameters, verified against the matrices."""
    if not isinstance(ginv, GInverse):
        ginv = from_matrix(chain, ginv)
    G = ginv.G
    a, b, gamma = ginv.params.alpha, ginv.params.beta, ginv.params.gamma
    pi, e, m = chain.pi, chain.e, chain.m
    by_params = ConditionSet(
        c2=abs(gamma + 1.0) <= CLASS_TOL * max(1.0, abs(gamma)),
        c3=_vec_close(a, pi / (pi @ pi)),
        c4=_vec_close(b, e / m),
        c5a=_vec_close(a, e),
        c5b=_vec_close(b, pi),
    )
    K = chain.kernel
    nG = inf_norm(G)
    KG, GK = K @ G, G @ K
    direct = ConditionSet(
        c2=_matrix_close(G @ K @ G, G, nG * nG * inf_norm(K)),
        c3=_matrix_close(KG, KG.T, nG),
        c4=_matrix_close(GK, GK.T, nG),
        c5a=_is_proportional(G @ e, e),
        c5b=_is_proportional(pi @ G, pi),
    )
    c5_direct = _matrix_close(KG, GK, nG)
    if by_params != direct or by_params.c5 != c5_direct:
        raise ClassificationInconsistent(
            f"parameter tests give {by_params}, matrix conditions give {direct} (c5={c5_direct})"
        )
    return by_params


def fundamental_matrix(chain: StochasticChain) -> GInverse:
    """Kemeny and Snell's ``Z = [I - P + e pi^T]^{-1}``."""
    Z = invert(chain.kernel + chain.Pi)
    scale = max(1.0, inf_norm(Z))
    if inf_norm(Z @ chain.e - chain.e) > CHECK_TOL * scale or inf_norm(chain.pi @ Z - chain.pi) > CHECK_TOL * scale:
        raise RouteDisagreement("Z e = e or pi^T Z = pi^T fails")
    return GInverse(frozen(Z), GInverseParams(chain.e, chain.pi, 0.0), chain)


def group_inverse(chain: StochasticChain) -> GInverse:
    """``A# = Z - e pi^T``, the unique member of A{1, 2, 5}."""
    Z = fundamental_matrix(chain).G
    Ash = Z - chain.Pi
    K = chain.kernel
    scale = max(1.0, inf_norm(Ash))
    residuals = {
        "1": inf_norm(K @ Ash @ K - K) / scale,
        "2": inf_norm(Ash @ K @ Ash - Ash) / scale**2,
        "5": inf_norm(K @ Ash - Ash @ K) / scale,
        "A#e=0": inf_norm(Ash @ chain.e) / scale,
        "pi^T A#=0": inf_norm(chain.pi @ Ash) / scale,
    }
    bad = {k: v for k, v in residuals.items() if v > CHECK_TOL}
    if bad:
        raise RouteDisagreement(f"group inverse fails conditions {bad}")
    return GInverse(frozen(Ash), GInverseParams(chain.e, chain.pi, -1.0), chain)


def penrose_residuals(A, X) -> dict[str, float]:
    """Residuals of the four Penrose conditions for ``X`` as an inverse of ``A``."""
    AX, XA = A @ X, X @ A
    return {
        "1": inf_norm(AX @ A - A),
        "2": inf_norm(XA @ X - X),
        "3": inf_norm(AX.T - AX),
        "4": inf_norm(XA.T - XA),
    }


def moore_penrose_forms(chain: StochasticChain) -> tuple[np.ndarray, np.ndarray]:
    """The two closed forms ``[I-P+pi e^T]^{-1} - e pi^T/(m pi^T pi)`` and
    ``[I-P+a pi e^T]^{-1} - a e pi^T`` with ``a = 1/sqrt(m pi^T pi)``."""
    pi, e, m = chain.pi, chain.e, chain.m
    pp = float(pi @ pi)
    unscaled = invert(chain.kernel + np.outer(pi, e)) - np.outer(e, pi) / (m * pp)
    a = 1.0 / np.sqrt(m * pp)
    scaled = invert(chain.kernel + a * np.outer(pi, e)) - a * np.outer(e, pi)
    return unscaled, scaled


def moore_penrose(chain: StochasticChain) -> GInverse:
    unscaled, scaled = moore_penrose_forms(chain)
    scale = max(1.0, inf_norm(unscaled))
    gap = inf_norm(unscaled - scaled) / scale
    if gap > CHECK_TOL:
        raise MPFormsDisagree(f"the two Moore-Penrose forms differ by {gap:.3e}")
    res = penrose_residuals(chain.kernel, unscaled)
    worst = max(res.values()) / scale**2
    if worst > CHECK_TOL:
        raise RouteDisagreement(f"Moore-Penrose candidate fails Penrose conditions: {res}")
    pi = chain.pi
    params = GInverseParams(pi / (pi @ pi), chain.e / chain.m, -1.0)
    return GInverse(frozen(unscaled), params, chain)


def deflate(ginv: GInverse) -> GInverse:
    """``H = G (I - Pi)``, which lies in A{1, 2, 5a} with parameters ``(e, beta, -1)``."""
    chain = ginv.chain
    H = ginv.G @ (np.eye(chain.m) - chain.Pi)
    return GInverse(frozen(H), characterize(chain, H), chain)


def project_to_group_inverse(chain: StochasticChain, G) -> np.ndarray:
    """``(I - Pi) G (I - Pi)``, which equals ``A#`` for every g-inverse ``G``."""
    G = _matrix_of(G)
    check_condition1(chain, G)
    Q = np.eye(chain.m) - chain.Pi
    S = Q @ G @ Q
    Ash = group_inverse(chain).G
    gap = inf_norm(S - Ash) / max(1.0, inf_norm(G))
    if gap > CHECK_TOL:
        raise RouteDisagreement(f"(I-Pi)G(I-Pi) differs from A# by {gap:.3e}", discrepancy=gap)
    return S
