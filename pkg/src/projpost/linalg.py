"""Cholesky-based solvers shared across the package.

All posterior quantities are computed through Gram-matrix Cholesky
factorizations and triangular solves. Explicit matrix inversion is limited to
covariance matrices recovered from an existing factor; n-by-n projection
matrices are materialized only by the identity-check routine in
:mod:`projpost.analytic`, which bounds n.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import RankError

# A factorization counts as full rank when every squared pivot exceeds this
# multiple of the largest Gram diagonal entry.
PIVOT_RTOL = 1e-10


def pivot_floor(gram: np.ndarray) -> float:
    """Smallest admissible squared Cholesky pivot for this Gram matrix."""
    return PIVOT_RTOL * float(np.max(np.diag(gram), initial=0.0))


def _first_bad_pivot(gram: np.ndarray, floor: float) -> int:
    """Index of the first pivot at or below ``floor`` in a manual factorization."""
    g = np.array(gram, dtype=float)
    m = g.shape[0]
    for k in range(m):
        piv = g[k, k]
        if not np.isfinite(piv) or piv <= floor:
            return k
        root = np.sqrt(piv)
        g[k:, k] /= root
        g[k + 1:, k + 1:] -= np.outer(g[k + 1:, k], g[k + 1:, k])
    return m - 1


def chol_gram(gram: np.ndarray, names: Sequence[str] | None = None) -> np.ndarray:
    """Lower Cholesky factor of a Gram matrix, with the rank policy applied.

    Raises RankError naming the first offending column when a pivot falls at
    or below PIVOT_RTOL times the largest diagonal entry.
    """
    g = np.asarray(gram, dtype=float)
    if g.shape[0] == 0:
        return np.zeros((0, 0))
    floor = pivot_floor(g)

    def _fail(k: int) -> RankError:
        name = names[k] if names is not None and k < len(names) else f"column {k}"
        return RankError(
            f"design is rank deficient: pivot for {name!r} fell below "
            f"{PIVOT_RTOL:g} times the largest Gram diagonal",
            column=name if names is not None and k < len(names) else None,
        )

    try:
        lower = scipy.linalg.cholesky(g, lower=True)
    except scipy.linalg.LinAlgError:
        raise _fail(_first_bad_pivot(g, floor)) from None
    piv2 = np.diag(lower) ** 2
    bad = np.flatnonzero(piv2 <= floor)
    if bad.size:
        raise _fail(int(bad[0]))
    return lower


def chol_solve(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L Lᵀ) x = b given the lower factor."""
    if lower.shape[0] == 0:
        return np.zeros_like(np.asarray(b, dtype=float))
    return scipy.linalg.cho_solve((lower, True), b)


def spd_inverse(lower: np.ndarray) -> np.ndarray:
    """Inverse of L Lᵀ from its lower factor, symmetrized."""
    m = lower.shape[0]
    if m == 0:
        return np.zeros((0, 0))
    inv = scipy.linalg.cho_solve((lower, True), np.eye(m))
    return (inv + inv.T) / 2.0


def chol_update(lower: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Factor of L Lᵀ + v vᵀ from the factor of L Lᵀ.

    Positive rank-one update, so the result is always well defined; O(m²).
    """
    out = np.array(lower, dtype=float)
    w = np.array(v, dtype=float)
    m = out.shape[0]
    for k in range(m):
        r = np.hypot(out[k, k], w[k])
        c = r / out[k, k]
        s = w[k] / out[k, k]
        out[k, k] = r
        if k + 1 < m:
            out[k + 1:, k] = (out[k + 1:, k] + s * w[k + 1:]) / c
            w[k + 1:] = c * w[k + 1:] - s * out[k + 1:, k]
    return out


def chol_delete(lower: np.ndarray, j: int) -> np.ndarray:
    """Factor of the Gram matrix with row and column ``j`` removed.

    Only the trailing block changes, via a positive rank-one update of its
    factor; the leading block is reused as-is.
    """
    m = lower.shape[0]
    if not 0 <= j < m:
        raise IndexError(f"index {j} out of range for factor of size {m}")
    out = np.zeros((m - 1, m - 1))
    out[:j, :j] = lower[:j, :j]
    out[j:, :j] = lower[j + 1:, :j]
    if j < m - 1:
        out[j:, j:] = chol_update(lower[j + 1:, j + 1:], lower[j + 1:, j])
    return out
