"""Random test instances: chains, admissible parameters, perturbations."""
from __future__ import annotations

import numpy as np

from .chain import StochasticChain, validate_chain
from .errors import NotIrreducible
from .ginverse import GInverseParams


def random_chain(rng: np.random.Generator, m: int, density: float = 0.7) -> StochasticChain:
    """Random irreducible chain: sparse random weights plus a random m-cycle."""
    W = rng.random((m, m)) * (rng.random((m, m)) < density)
    cycle = rng.permutation(m)
    W[cycle, np.roll(cycle, 1)] += rng.uniform(0.1, 1.0, m)
    return validate_chain(W / W.sum(axis=1, keepdims=True))


def _normalized(rng, m, weights, floor=0.1):
    while True:
        x = rng.uniform(-1.0, 1.0, m)
        s = float(weights @ x)
        if abs(s) >= floor:
            return x / s


def random_params(rng: np.random.Generator, chain: StochasticChain) -> GInverseParams:
    """``alpha`` with ``pi^T alpha = 1``, ``beta`` with ``beta^T e = 1``, gamma in [-2, 2]."""
    m = chain.m
    alpha = _normalized(rng, m, chain.pi)
    beta = _normalized(rng, m, np.ones(m))
    return GInverseParams(alpha, beta, rng.uniform(-2.0, 2.0))


def random_perturbation(rng: np.random.Generator, chain: StochasticChain, max_norm: float = 0.1,
                        attempts: int = 100) -> np.ndarray:
    """Zero-row-sum ``E`` with ``||E||_inf <= max_norm`` keeping ``P + E`` irreducible.

    Each row moves mass between two of its columns; the moved amount is
    clipped so that ``P + E`` stays non-negative.
    """
    m = chain.m
    P = chain.P
    for _ in range(attempts):
        E = np.zeros((m, m))
        for i in range(m):
            src, dst = rng.choice(m, size=2, replace=False)
            eps = min(rng.uniform(0.0, max_norm / 2), P[i, src])
            E[i, src] -= eps
            E[i, dst] += eps
        try:
            validate_chain(P + E)
        except NotIrreducible:
            continue
        return E
    raise RuntimeError("could not draw an irreducible perturbation")
