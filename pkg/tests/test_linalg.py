"""Cholesky helpers against dense numpy oracles."""
import numpy as np
import pytest

from projpost.errors import RankError
from projpost.linalg import (
    chol_delete,
    chol_gram,
    chol_solve,
    chol_update,
    pivot_floor,
    spd_inverse,
)


def random_gram(rng, p, n=50):
    a = rng.standard_normal((n, p))
    return a.T @ a


def test_chol_gram_matches_numpy():
    rng = np.random.default_rng(0)
    for p in (1, 2, 5, 9):
        g = random_gram(rng, p)
        np.testing.assert_allclose(chol_gram(g), np.linalg.cholesky(g), rtol=1e-12)


def test_chol_gram_empty():
    lower = chol_gram(np.zeros((0, 0)))
    assert lower.shape == (0, 0)


def test_chol_gram_names_failing_column():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((30, 3))
    a = np.column_stack([a, a[:, 1]])  # column 3 duplicates column 1
    with pytest.raises(RankError) as err:
        chol_gram(a.T @ a, names=("w", "x", "y", "x_copy"))
    assert "x_copy" in str(err.value)
    assert err.value.column == "x_copy"


def test_pivot_floor_scales_with_gram():
    rng = np.random.default_rng(2)
    g = random_gram(rng, 4)
    assert pivot_floor(1e6 * g) == pytest.approx(1e6 * pivot_floor(g))


def test_chol_solve_matches_dense_solve():
    rng = np.random.default_rng(3)
    g = random_gram(rng, 6)
    b = rng.standard_normal(6)
    np.testing.assert_allclose(
        chol_solve(chol_gram(g), b), np.linalg.solve(g, b), rtol=1e-10
    )


def test_spd_inverse_matches_dense_inverse():
    rng = np.random.default_rng(4)
    g = random_gram(rng, 5)
    inv = spd_inverse(chol_gram(g))
    np.testing.assert_allclose(inv, np.linalg.inv(g), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(inv, inv.T, rtol=0, atol=1e-14)


def test_chol_update_is_rank_one_append():
    """L' from chol_update(L, v) must factor G + v v^T."""
    rng = np.random.default_rng(5)
    for trial in range(20):
        p = int(rng.integers(1, 8))
        g = random_gram(rng, p)
        v = rng.standard_normal(p)
        updated = chol_update(chol_gram(g), v)
        np.testing.assert_allclose(
            updated @ updated.T, g + np.outer(v, v), rtol=1e-10, atol=1e-10
        )
        assert np.all(np.diag(updated) > 0)
        assert np.allclose(np.triu(updated, 1), 0)


def test_chol_delete_matches_subgram_factor():
    rng = np.random.default_rng(6)
    for trial in range(20):
        p = int(rng.integers(2, 9))
        g = random_gram(rng, p)
        j = int(rng.integers(p))
        keep = [k for k in range(p) if k != j]
        reduced = chol_delete(chol_gram(g), j)
        np.testing.assert_allclose(
            reduced @ reduced.T, g[np.ix_(keep, keep)], rtol=1e-10, atol=1e-10
        )


def test_chol_delete_then_solve():
    """Deletion output is usable directly as a factor."""
    rng = np.random.default_rng(7)
    g = random_gram(rng, 5)
    j = 2
    keep = [0, 1, 3, 4]
    b = rng.standard_normal(4)
    np.testing.assert_allclose(
        chol_solve(chol_delete(chol_gram(g), j), b),
        np.linalg.solve(g[np.ix_(keep, keep)], b),
        rtol=1e-9,
    )
