from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from tvgp_bandit.utils.errors import NumericalFailure

JITTER_LADDER: tuple[float, ...] = (0.0, 1e-10, 1e-8, 1e-6)


def jittered_cholesky(
    matrix: np.ndarray, ladder: Sequence[float] = JITTER_LADDER
) -> tuple[np.ndarray, float]:
    """
    Lower Cholesky factor of `matrix`, adding the first jitter from `ladder` to the
    diagonal that makes the factorization succeed.

    :param matrix: Symmetric matrix to factorize
    :param ladder: Increasing diagonal jitters to try, in order
    :return: (L, jitter used)
    :raises NumericalFailure: if every rung fails
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros((0, 0)), 0.0
    identity = np.eye(matrix.shape[0])
    for jitter in ladder:
        try:
            factor = cholesky(matrix + jitter * identity, lower=True, check_finite=True)
        except (LinAlgError, ValueError):
            continue
        if jitter > 0.0:
            logger.debug(f"Cholesky needed jitter {jitter:g} (size {matrix.shape[0]})")
        return factor, jitter
    raise NumericalFailure(
        f"Cholesky failed on a {matrix.shape[0]}x{matrix.shape[0]} matrix "
        f"after jitters {list(ladder)}"
    )


def log_det_from_factor(factor: np.ndarray) -> float:
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def cho_solve_lower(factor: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L Lᵀ) x = rhs given the lower factor L."""
    forward = solve_triangular(factor, rhs, lower=True, check_finite=False)
    return solve_triangular(factor.T, forward, lower=False, check_finite=False)


class IncrementalCholesky:
    """
    Lower Cholesky factor of a matrix that grows by one row/column at a time.

    Appending a row costs one triangular solve (O(n²)) instead of a full O(n³)
    refactorization. A pivot that comes out non-positive is retried with the jitter
    ladder added to the new diagonal entry only.
    """

    def __init__(self, ladder: Sequence[float] = JITTER_LADDER, capacity: int = 16):
        self.ladder = tuple(ladder)
        self._buffer = np.zeros((capacity, capacity))
        self._size = 0
        self.jitter_used = 0.0

    @property
    def size(self) -> int:
        return self._size

    @property
    def factor(self) -> np.ndarray:
        return self._buffer[: self._size, : self._size]

    def reset(self) -> None:
        self._size = 0
        self.jitter_used = 0.0

    def _grow(self) -> None:
        capacity = max(2 * self._buffer.shape[0], 1)
        bigger = np.zeros((capacity, capacity))
        bigger[: self._size, : self._size] = self.factor
        self._buffer = bigger

    def extend(self, cross: np.ndarray, diagonal: float) -> np.ndarray:
        """
        Append a row/column with off-diagonal block `cross` (length n) and diagonal
        entry `diagonal`.

        :return: The new bottom row of L without its diagonal entry (L⁻¹ cross)
        """
        n = self._size
        cross = np.asarray(cross, dtype=float).reshape(-1)
        if cross.shape[0] != n:
            raise ValueError(f"cross has length {cross.shape[0]}, expected {n}")
        if n == self._buffer.shape[0]:
            self._grow()

        row = (
            solve_triangular(self.factor, cross, lower=True, check_finite=False)
            if n
            else np.zeros(0)
        )
        residual = float(diagonal - row @ row)
        for jitter in self.ladder:
            pivot = residual + jitter
            if pivot > 0.0 and np.isfinite(pivot):
                self.jitter_used = max(self.jitter_used, jitter)
                break
        else:
            raise NumericalFailure(
                f"Incremental Cholesky pivot {residual:.3e} stayed non-positive "
                f"after jitters {list(self.ladder)}"
            )
        self._buffer[n, :n] = row
        self._buffer[n, n] = np.sqrt(pivot)
        self._size = n + 1
        return row

    def solve_lower(self, rhs: np.ndarray) -> np.ndarray:
        """L⁻¹ rhs."""
        return solve_triangular(self.factor, rhs, lower=True, check_finite=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """(L Lᵀ)⁻¹ rhs."""
        return cho_solve_lower(self.factor, rhs)

    def log_det(self) -> float:
        return log_det_from_factor(self.factor)

    @classmethod
    def from_matrix(
        cls, matrix: np.ndarray, ladder: Optional[Sequence[float]] = None
    ) -> "IncrementalCholesky":
        """Build by appending the rows of `matrix` one by one."""
        matrix = np.asarray(matrix, dtype=float)
        size = max(matrix.shape[0], 1)
        incremental = cls(ladder=ladder or JITTER_LADDER, capacity=size)
        for i in range(matrix.shape[0]):
            incremental.extend(matrix[i, :i], matrix[i, i])
        return incremental
