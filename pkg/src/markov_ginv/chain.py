"""Validated finite irreducible Markov chains and their stationary vectors."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NotIrreducible, NotStochastic, SingularMatrix
from .matrix_core import DEFAULT_TOL, Tolerance, as_matrix, as_vector, frozen, solve_linear


@dataclass(frozen=True)
class StochasticChain:
    """An irreducible transition matrix together with its stationary vector.

    Build instances with :func:`validate_chain`; the arrays are read-only.
    """

    P: np.ndarray
    pi: np.ndarray
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    @property
    def m(self) -> int:
        return self.P.shape[0]

    @property
    def e(self) -> np.ndarray:
        return np.ones(self.m)

    @property
    def Pi(self) -> np.ndarray:
        """The limiting matrix ``e pi^T``."""
        return np.outer(self.e, self.pi)

    @property
    def kernel(self) -> np.ndarray:
        """The Markovian kernel ``I - P``."""
        return np.eye(self.m) - self.P


def is_irreducible(P) -> bool:
    """Strong connectivity of the graph with an edge i -> j whenever p_ij > 0."""
    adj = np.asarray(P) > 0
    m = adj.shape[0]

    def reaches_all(adjacency):
        seen = np.zeros(m, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(adjacency[i] & ~seen):
                seen[j] = True
                queue.append(j)
        return bool(seen.all())

    return reaches_all(adj) and reaches_all(adj.T)


def stationary_distribution(P, u=None) -> np.ndarray:
    """Stationary vector from ``u^T [I - P + e u^T]^{-1} = pi^T``.

    ``u`` defaults to ``e/m``; any ``u`` with ``u^T e != 0`` gives the same
    answer. The result is renormalized to sum to exactly one.
    """
    P = as_matrix(P, square=True)
    m = P.shape[0]
    e = np.ones(m)
    u = e / m if u is None else as_vector(u, m)
    if abs(u.sum()) < 1e-12:
        raise ValueError("u^T e must be non-zero")
    kernel = np.eye(m) - P + np.outer(e, u)
    x = solve_linear(kernel.T, u)
    return x / x.sum()


def validate_chain(P_raw, tol: Tolerance = DEFAULT_TOL, labels=None) -> StochasticChain:
    """Check stochasticity and irreducibility, renormalize rows, attach pi."""
    P = as_matrix(P_raw, square=True)
    neg = np.argwhere(P < 0)
    if neg.size:
        i, j = neg[0]
        raise NotStochastic(f"row {i}: negative entry {P[i, j]!r} in column {j}", row=int(i))
    sums = P.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > tol.abs + tol.rel:
            raise NotStochastic(f"row {i} sums to {s!r}, not 1", row=i)
    P = P / sums[:, None]
    # push the last rounding error into each row's largest entry
    rows = np.arange(P.shape[0])
    big = P.argmax(axis=1)
    P[rows, big] += 1.0 - P.sum(axis=1)
    if not is_irreducible(P):
        raise NotIrreducible("transition graph is not strongly connected")
    try:
        pi = stationary_distribution(P)
    except SingularMatrix as exc:
        raise NotIrreducible(f"I - P + e u^T is numerically singular: {exc}") from exc
    if not np.all(pi > 0):
        raise NotIrreducible(f"stationary vector has non-positive entries: {pi}")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != P.shape[0]:
            raise ValueError(f"{len(labels)} labels for {P.shape[0]} states")
    return StochasticChain(P=frozen(P), pi=frozen(pi), labels=labels)
