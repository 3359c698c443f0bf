import numpy as np
import pytest

from tvgp_bandit.gp_core.cholesky import (
    IncrementalCholesky,
    cho_solve_lower,
    jittered_cholesky,
    log_det_from_factor,
)
from tvgp_bandit.utils.errors import NumericalFailure
from utils import random_spd


def test_jittered_cholesky_no_jitter_needed(rng):
    matrix = random_spd(6, rng)
    factor, jitter = jittered_cholesky(matrix)
    assert jitter == 0.0
    assert np.allclose(factor @ factor.T, matrix)
    assert log_det_from_factor(factor) == pytest.approx(np.linalg.slogdet(matrix)[1])


def test_jittered_cholesky_rank_deficient_uses_ladder():
    ones = np.ones((4, 4))
    _, jitter = jittered_cholesky(ones)
    assert jitter > 0.0


def test_jittered_cholesky_gives_up():
    with pytest.raises(NumericalFailure):
        jittered_cholesky(-np.eye(3))


def test_jittered_cholesky_empty():
    factor, jitter = jittered_cholesky(np.zeros((0, 0)))
    assert factor.shape == (0, 0) and jitter == 0.0


def test_cho_solve(rng):
    matrix = random_spd(5, rng)
    rhs = rng.standard_normal(5)
    factor, _ = jittered_cholesky(matrix)
    assert np.allclose(matrix @ cho_solve_lower(factor, rhs), rhs)


def test_incremental_matches_batch(rng):
    matrix = random_spd(40, rng)
    incremental = IncrementalCholesky(capacity=2)
    for i in range(40):
        incremental.extend(matrix[i, :i], matrix[i, i])
    batch, _ = jittered_cholesky(matrix)
    assert incremental.size == 40
    assert np.allclose(incremental.factor, batch)
    assert incremental.log_det() == pytest.approx(log_det_from_factor(batch))
    rhs = rng.standard_normal(40)
    assert np.allclose(incremental.solve(rhs), np.linalg.solve(matrix, rhs))


def test_incremental_reset_and_from_matrix(rng):
    matrix = random_spd(4, rng)
    incremental = IncrementalCholesky.from_matrix(matrix)
    assert incremental.size == 4
    incremental.reset()
    assert incremental.size == 0
    incremental.extend(np.zeros(0), 2.0)
    assert incremental.factor[0, 0] == pytest.approx(np.sqrt(2.0))


def test_incremental_duplicate_row_takes_jitter():
    incremental = IncrementalCholesky()
    incremental.extend(np.zeros(0), 1.0)
    incremental.extend(np.ones(1), 1.0)
    assert incremental.jitter_used > 0.0


def test_incremental_negative_pivot_fails():
    incremental = IncrementalCholesky()
    incremental.extend(np.zeros(0), 1.0)
    with pytest.raises(NumericalFailure):
        incremental.extend(np.array([2.0]), 1.0)


def test_incremental_wrong_cross_length():
    with pytest.raises(ValueError):
        IncrementalCholesky().extend(np.ones(2), 1.0)
