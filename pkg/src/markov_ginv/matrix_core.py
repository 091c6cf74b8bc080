"""Small dense linear algebra on top of numpy arrays.

Matrices are plain 2-d float64 ``ndarray`` objects and vectors are 1-d.
The solver is a textbook LU factorization with partial pivoting; it is kept
in-house so that the singularity test is explicit and identical everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SingularMatrix

PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative tolerance: ``|a - b| <= abs + rel * max(|a|, |b|)``."""

    abs: float = 1e-9
    rel: float = 1e-9

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs == 0 and self.rel == 0:
            raise ValueError("at least one of abs, rel must be positive")

    @classmethod
    def uniform(cls, value: float) -> "Tolerance":
        return cls(abs=value, rel=value)


DEFAULT_TOL = Tolerance()


def as_matrix(A, square: bool = False) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeMismatch(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(v, length: int | None = None) -> np.ndarray:
    v = np.array(v, dtype=float).reshape(-1)
    if v.size < 1:
        raise ShapeMismatch("empty vector")
    if length is not None and v.size != length:
        raise ShapeMismatch(f"expected vector of length {length}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def lu_factor(A) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(LU, perm)`` with ``A[perm] = L @ U`` packed into one array.

    Raises SingularMatrix when a pivot falls to ``PIVOT_RTOL`` times the
    largest absolute entry of the corresponding column of ``A`` or below.
    """
    LU = as_matrix(A, square=True).copy()
    n = LU.shape[0]
    thresholds = PIVOT_RTOL * np.abs(LU).max(axis=0)
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if abs(LU[p, k]) <= thresholds[k]:
            raise SingularMatrix(f"pivot {k} is {abs(LU[p, k]):.3e} (threshold {thresholds[k]:.3e})")
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        # rank-one update; elementwise, so every column of the result is
        # computed independently of the others
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(LU: np.ndarray, perm: np.ndarray, B) -> np.ndarray:
    B = np.array(B, dtype=float)
    vector_rhs = B.ndim == 1
    n = LU.shape[0]
    if B.shape[0] != n:
        raise ShapeMismatch(f"right-hand side has {B.shape[0]} rows, expected {n}")
    X = B.reshape(n, -1)[perm].copy()
    for k in range(n):
        X[k + 1:] -= np.outer(LU[k + 1:, k], X[k])
    for k in range(n - 1, -1, -1):
        X[k] /= LU[k, k]
        X[:k] -= np.outer(LU[:k, k], X[k])
    return X[:, 0] if vector_rhs else X


def solve_linear(A, B) -> np.ndarray:
    """Solve ``A X = B`` for square ``A``; ``B`` may be a vector or a matrix."""
    LU, perm = lu_factor(A)
    return lu_solve(LU, perm, B)


def invert(A) -> np.ndarray:
    A = as_matrix(A, square=True)
    return solve_linear(A, np.eye(A.shape[0]))


def inf_norm(A) -> float:
    """Maximum absolute row sum (vectors are treated as a single column)."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        return float(np.abs(A).max())
    return float(np.abs(A).sum(axis=1).max())


def approx_eq(A, B, tol: Tolerance = DEFAULT_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    bound = tol.abs + tol.rel * np.maximum(np.abs(A), np.abs(B))
    return bool(np.all(np.abs(A - B) <= bound))


def max_abs_diff(A, B) -> float:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return float(np.abs(A - B).max())


def scaled_diff(A, B) -> float:
    """Max absolute difference divided by ``max(1, max|A|, max|B|)``."""
    scale = max(1.0, float(np.abs(A).max()), float(np.abs(B).max()))
    return max_abs_diff(A, B) / scale


def diag_part(A) -> np.ndarray:
    """Diagonal matrix holding the diagonal of ``A`` (the ``X_d`` operation)."""
    return np.diag(np.diag(A))


def frozen(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    A.setflags(write=False)
    return A
