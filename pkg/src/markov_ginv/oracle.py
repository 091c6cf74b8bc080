"""Independent ground truth: simulation, power iteration, two-state closed forms.

Nothing here uses g-inverses, so these results can be compared against any
of the algebraic routes without circularity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import StochasticChain
from .errors import NoConvergence, TooManyCensored
from .matrix_core import as_matrix

RNG_ALGORITHM = "numpy.random.PCG64"
MAX_CENSORED_FRACTION = 0.01


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    max_steps: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1 or self.max_steps < 1:
            raise ValueError("trials and max_steps must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    second_moment: float
    stderr_mean: float
    stderr_second_moment: float
    trials_used: int
    censored: int = 0
    rng: str = RNG_ALGORITHM


def simulate_first_passage(chain: StochasticChain, i: int, j: int, cfg: SimConfig) -> EstimateWithError:
    """Monte Carlo estimate of ``T_ij = min{n >= 1 : X_n = j | X_0 = i}``.

    States are 0-based. All walks advance together, one vectorized step at a
    time; walks still running after ``cfg.max_steps`` are dropped.
    """
    m = chain.m
    if not (0 <= i < m and 0 <= j < m):
        raise IndexError(f"states must lie in 0..{m - 1}")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    cum = np.cumsum(chain.P, axis=1)
    cum[:, -1] = 1.0
    state = np.full(cfg.trials, i)
    hit = np.zeros(cfg.trials, dtype=np.int64)
    active = np.arange(cfg.trials)
    step = 0
    while active.size and step < cfg.max_steps:
        step += 1
        u = rng.random(active.size)
        nxt = (u[:, None] >= cum[state[active]]).sum(axis=1)
        state[active] = nxt
        done = nxt == j
        hit[active[done]] = step
        active = active[~done]
    censored = int(active.size)
    if censored > MAX_CENSORED_FRACTION * cfg.trials:
        raise TooManyCensored(f"{censored} of {cfg.trials} walks exceeded {cfg.max_steps} steps")
    times = hit[hit > 0].astype(float)
    n = times.size
    sq = times**2
    sd = times.std(ddof=1) if n > 1 else 0.0
    sd2 = sq.std(ddof=1) if n > 1 else 0.0
    return EstimateWithError(
        mean=float(times.mean()),
        second_moment=float(sq.mean()),
        stderr_mean=float(sd / np.sqrt(n)),
        stderr_second_moment=float(sd2 / np.sqrt(n)),
        trials_used=n,
        censored=censored,
    )


def power_iteration_pi(P, tol: float = 1e-13, max_iters: int = 1_000_000, lazy: bool = False) -> np.ndarray:
    """Iterate ``x^T <- x^T P`` from the uniform vector until ``||dx||_1 < tol``.

    ``lazy=True`` iterates with ``(P + I)/2`` instead, which has the same
    stationary vector and converges for periodic chains.
    """
    P = as_matrix(P, square=True)
    m = P.shape[0]
    if lazy:
        P = 0.5 * (P + np.eye(m))
    x = np.full(m, 1.0 / m)
    for _ in range(max_iters):
        y = x @ P
        y /= y.sum()
        if np.abs(y - x).sum() < tol:
            return y
        x = y
    raise NoConvergence(f"power iteration did not converge in {max_iters} iterations")


@dataclass(frozen=True)
class TwoStateValues:
    P: np.ndarray
    pi: np.ndarray
    M: np.ndarray
    Md2: np.ndarray
    M2: np.ndarray
    K: float
    Z: np.ndarray
    A_sharp: np.ndarray


def two_state_closed_form(a: float, b: float) -> TwoStateValues:
    """Everything about ``P = [[1-a, a], [b, 1-b]]`` in closed form.

    Passage times between the two states are geometric, so the first two
    moments follow from ``E[T] = 1/p`` and ``E[T^2] = (2-p)/p^2``; a return
    to state 1 is one step, or one step plus a geometric(b) passage back.
    """
    if not (0 < a <= 1 and 0 < b <= 1):
        raise ValueError(f"need 0 < a, b <= 1, got a={a}, b={b}")
    s = a + b
    P = np.array([[1 - a, a], [b, 1 - b]])
    pi = np.array([b / s, a / s])
    M = np.array([[s / b, 1 / a], [1 / b, s / a]])
    m12_2 = (2 - a) / a**2
    m21_2 = (2 - b) / b**2
    m11_2 = (1 - a) + a * (1 + 2 / b + m21_2)
    m22_2 = (1 - b) + b * (1 + 2 / a + m12_2)
    Md2 = np.array([m11_2, m22_2])
    M2 = np.array([[m11_2, m12_2], [m21_2, m22_2]])
    K = 1 + 1 / s
    # Z = [I - P + e pi^T]^{-1} by the 2x2 adjugate
    W = np.eye(2) - P + np.outer(np.ones(2), pi)
    det = W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]
    Z = np.array([[W[1, 1], -W[0, 1]], [-W[1, 0], W[0, 0]]]) / det
    A_sharp = Z - np.outer(np.ones(2), pi)
    return TwoStateValues(P=P, pi=pi, M=M, Md2=Md2, M2=M2, K=K, Z=Z, A_sharp=A_sharp)
