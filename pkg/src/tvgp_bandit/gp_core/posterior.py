"""
Exact GP posteriors for the time-invariant and the time-varying reward models.

The time-varying posterior conditions on observations y_i = f_{t_i}(x_i) + z_i using
K̃ = K∘D and k̃ = k∘d, where D and d hold the decay factors (1-ε)^{gap/2} between
observation times and the query time. With ε = 0 every decay factor is exactly 1 and
the computation is bit-identical to the time-invariant posterior.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from tvgp_bandit.gp_core.cholesky import (
    IncrementalCholesky,
    cho_solve_lower,
    jittered_cholesky,
)
from tvgp_bandit.kernel.decay import (
    decay_factor,
    decay_matrix_from_times,
    decay_vector_from_times,
    validate_eps,
)
from tvgp_bandit.kernel.kernels import (
    KernelSpec,
    as_points,
    kernel_matrix,
    prior_variance,
)
from tvgp_bandit.utils.errors import ConfigError, NumericalFailure

# Posterior variances are clipped at 0; a negative value beyond this is a real error.
_VARIANCE_FLOOR = -1e-8


@dataclass(frozen=True)
class Observation:
    time: float
    location: Any
    value: float


@dataclass
class ObservationHistory:
    """Time-stamped (t, x, y) records sharing one observation-noise variance."""

    noise_var: float
    records: list[Observation] = field(default_factory=list)

    def __post_init__(self):
        if not self.noise_var > 0:
            raise ConfigError(f"noise variance must be positive, got {self.noise_var}")

    def __len__(self) -> int:
        return len(self.records)

    def append(self, time: float, location, value: float) -> None:
        if self.records and time <= self.records[-1].time:
            raise ConfigError(
                f"observation times must increase, got {time} "
                f"after {self.records[-1].time}"
            )
        self.records.append(Observation(float(time), location, float(value)))

    @property
    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.records], dtype=float)

    @property
    def locations(self) -> np.ndarray:
        return np.vstack([np.atleast_1d(np.asarray(r.location)) for r in self.records])

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=float)

    @property
    def last_time(self) -> float:
        return self.records[-1].time if self.records else 0.0

    @classmethod
    def from_arrays(
        cls, noise_var: float, locations, values, times=None
    ) -> "ObservationHistory":
        """History with records at times 1..n unless `times` is given."""
        values = np.asarray(values, dtype=float).reshape(-1)
        times = np.arange(1, values.size + 1) if times is None else np.asarray(times)
        history = cls(noise_var=noise_var)
        for time, location, value in zip(times, list(locations), values):
            history.append(time, location, value)
        return history


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def _query_points(query) -> np.ndarray:
    return np.atleast_1d(np.asarray(query)).reshape(1, -1)


def _condition(
    gram: np.ndarray,
    cross: np.ndarray,
    values: np.ndarray,
    prior_var: np.ndarray,
    noise_var: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian conditioning given observation gram (n×n) and cross terms (n×m)."""
    factor, _ = jittered_cholesky(gram + noise_var * np.eye(gram.shape[0]))
    alpha = cho_solve_lower(factor, values)
    from_factor = cho_solve_lower(factor, cross)
    means = cross.T @ alpha
    variances = prior_var - np.einsum("ij,ij->j", cross, from_factor)
    if np.any(variances < _VARIANCE_FLOOR * np.maximum(prior_var, 1.0)):
        # jitter can leave tiny negatives but nothing larger
        raise NumericalFailure("posterior variance came out negative; kernel not PSD?")
    return means, np.clip(variances, 0.0, None)


def tv_posterior_batch(
    history: ObservationHistory,
    kernel: KernelSpec,
    eps: float,
    queries,
    lag: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Time-varying posterior means and variances at several query points, all at
    time `history.last_time + lag`.

    :param history: Observations so far
    :param kernel: Spatial kernel
    :param eps: Forgetting rate ε ∈ [0, 1]
    :param queries: Query points (rows), or indices for an empirical kernel
    :param lag: How many steps after the last observation to predict
    :return: (means, variances), one entry per query
    """
    eps = validate_eps(eps)
    query_points = as_points(queries)
    prior_var = prior_variance(kernel, query_points)
    if len(history) == 0:
        return np.zeros(query_points.shape[0]), prior_var

    times = history.times
    locations = history.locations
    decay = decay_matrix_from_times(times, eps)
    gram = kernel_matrix(kernel, locations) * decay
    d = decay_vector_from_times(times, eps, history.last_time + lag)
    cross = kernel_matrix(kernel, locations, query_points) * d[:, None]
    return _condition(gram, cross, history.values, prior_var, history.noise_var)


def tv_posterior(
    history: ObservationHistory,
    kernel: KernelSpec,
    eps: float,
    query,
    lag: float = 1.0,
) -> PosteriorSummary:
    """μ̃ and σ̃² at a single query point, `lag` steps after the last observation."""
    means, variances = tv_posterior_batch(history, kernel, eps, _query_points(query), lag)
    return PosteriorSummary(mean=float(means[0]), variance=float(variances[0]))


def ti_posterior(
    history: ObservationHistory, kernel: KernelSpec, query
) -> PosteriorSummary:
    """Standard GP posterior ignoring time stamps."""
    query_points = _query_points(query)
    prior_var = prior_variance(kernel, query_points)
    if len(history) == 0:
        return PosteriorSummary(mean=0.0, variance=float(prior_var[0]))
    locations = history.locations
    gram = kernel_matrix(kernel, locations)
    cross = kernel_matrix(kernel, locations, query_points)
    means, variances = _condition(
        gram, cross, history.values, prior_var, history.noise_var
    )
    return PosteriorSummary(mean=float(means[0]), variance=float(variances[0]))


def joint_conditioning_oracle(
    history: ObservationHistory,
    kernel: KernelSpec,
    eps: float,
    query,
    lag: float = 1.0,
) -> PosteriorSummary:
    """
    Brute-force posterior: assemble the joint covariance of every observed value and
    the queried value from Cov[f_s(x), f_{s+j}(x')] = (1-ε)^{j/2} k(x, x'), then
    condition with a dense solve. O(t³), no factor reuse; used to validate the
    faster paths.
    """
    eps = validate_eps(eps)
    query_point = _query_points(query)
    if len(history) == 0:
        prior_var = float(prior_variance(kernel, query_point)[0])
        return PosteriorSummary(mean=0.0, variance=prior_var)

    n = len(history)
    locations = history.locations
    all_points = np.vstack([locations, query_point])
    all_times = np.append(history.times, history.last_time + lag)
    joint = np.empty((n + 1, n + 1))
    spatial = kernel_matrix(kernel, all_points)
    for i in range(n + 1):
        for j in range(n + 1):
            joint[i, j] = decay_factor(all_times[i] - all_times[j], eps) * spatial[i, j]

    observed = joint[:n, :n] + history.noise_var * np.eye(n)
    cross = joint[:n, n]
    weights = np.linalg.solve(observed, cross)
    mean = float(weights @ history.values)
    variance = float(joint[n, n] - weights @ cross)
    return PosteriorSummary(mean=mean, variance=max(variance, 0.0))


class IncrementalPosterior:
    """
    Posterior over a finite arm set, updated one observation at a time.

    Owns its factor state; not meant to be shared between threads. With ε = 0 the
    rows of L⁻¹K(X, arms) are kept as well, so predicting every arm costs O(n·m)
    per step. With ε > 0 the decay to the next step changes every time, so the
    cross terms are rebuilt and solved each step while the factor of K∘D + σ²I
    still grows incrementally.
    """

    def __init__(
        self,
        gram: np.ndarray,
        noise_var: float,
        eps: float = 0.0,
        prior_mean: Optional[np.ndarray] = None,
    ):
        if not noise_var > 0:
            raise ConfigError(f"noise variance must be positive, got {noise_var}")
        self.gram = np.asarray(gram, dtype=float)
        self.noise_var = float(noise_var)
        self.eps = validate_eps(eps)
        self.n_arms = self.gram.shape[0]
        self.prior_mean = (
            np.zeros(self.n_arms) if prior_mean is None else np.asarray(prior_mean, float)
        )
        self.prior_var = np.diag(self.gram).copy()
        self._chol = IncrementalCholesky()
        self.reset()

    def reset(self) -> None:
        """Forget every observation (R-GP-UCB block boundary)."""
        self._chol.reset()
        self._arms: list[int] = []
        self._times: list[float] = []
        self._residuals: list[float] = []
        self._whitened: list[float] = []
        self._rows: list[np.ndarray] = []

    @property
    def size(self) -> int:
        return len(self._arms)

    @property
    def last_time(self) -> float:
        return self._times[-1] if self._times else 0.0

    def update(self, arm: int, value: float, time: Optional[float] = None) -> None:
        """Condition on `value` observed at `arm`; time defaults to the next step."""
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} outside [0, {self.n_arms})")
        time = self.last_time + 1.0 if time is None else float(time)
        arms = np.array(self._arms, dtype=int)
        times = np.array(self._times, dtype=float)
        cross = self.gram[arms, arm] * decay_factor(time - times, self.eps)
        row = self._chol.extend(cross, self.gram[arm, arm] + self.noise_var)
        pivot = self._chol.factor[-1, -1]

        residual = float(value) - self.prior_mean[arm]
        whitened = (residual - row @ np.array(self._whitened)) / pivot
        self._arms.append(int(arm))
        self._times.append(time)
        self._residuals.append(residual)
        self._whitened.append(whitened)
        if self.eps == 0.0:
            previous = np.array(self._rows) if self._rows else np.zeros((0, self.n_arms))
            self._rows.append((self.gram[arm] - row @ previous) / pivot)

    def predict(
        self, query_time: Optional[float] = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Posterior means and variances of every arm at `query_time` (default: the
        step after the last observation).
        """
        if not self._arms:
            return self.prior_mean.copy(), self.prior_var.copy()
        if self.eps == 0.0:
            projected = np.array(self._rows)
        else:
            query_time = self.last_time + 1.0 if query_time is None else query_time
            d = decay_factor(query_time - np.array(self._times), self.eps)
            cross = self.gram[np.array(self._arms)] * d[:, None]
            projected = self._chol.solve_lower(cross)
        means = self.prior_mean + projected.T @ np.array(self._whitened)
        variances = self.prior_var - np.einsum("ij,ij->j", projected, projected)
        return means, np.clip(variances, 0.0, None)
