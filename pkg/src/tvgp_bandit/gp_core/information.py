"""
Mutual information between a GP and noisy samples of it, in nats.

I(f; y) = ½ log det(I + σ⁻² K) for a gram K of the sampled values. For the
time-varying model the gram of points sampled at times 1..T is K∘D.
"""

import numpy as np

from tvgp_bandit.gp_core.cholesky import jittered_cholesky, log_det_from_factor
from tvgp_bandit.gp_core.posterior import IncrementalPosterior
from tvgp_bandit.kernel.decay import decay_matrix, validate_eps
from tvgp_bandit.kernel.kernels import KernelSpec, kernel_matrix
from tvgp_bandit.utils.errors import ConfigError


def _check_noise(noise_var: float) -> None:
    if not noise_var > 0:
        raise ConfigError(f"noise variance must be positive, got {noise_var}")


def mutual_information(gram: np.ndarray, noise_var: float) -> float:
    """½ log det(I + σ⁻² gram) from the Cholesky factor of I + σ⁻² gram."""
    _check_noise(noise_var)
    gram = np.asarray(gram, dtype=float)
    if gram.size == 0:
        return 0.0
    factor, _ = jittered_cholesky(np.eye(gram.shape[0]) + gram / noise_var)
    return 0.5 * log_det_from_factor(factor)


def telescoped_information(gram: np.ndarray, noise_var: float) -> float:
    """
    ½ Σ_t log(1 + σ⁻² σ²_{t-1}(x_t)), where σ²_{t-1}(x_t) is the variance of the t-th
    sampled value given noisy observations of the first t-1. Each conditional
    variance is computed with a dense solve.
    """
    _check_noise(noise_var)
    gram = np.asarray(gram, dtype=float)
    total = 0.0
    for t in range(gram.shape[0]):
        prior = gram[t, t]
        if t == 0:
            variance = prior
        else:
            seen = gram[:t, :t] + noise_var * np.eye(t)
            cross = gram[:t, t]
            variance = prior - cross @ np.linalg.solve(seen, cross)
        total += 0.5 * np.log1p(max(variance, 0.0) / noise_var)
    return float(total)


def tv_gram(points, kernel: KernelSpec, eps: float) -> np.ndarray:
    """K∘D for points sampled one per step at times 1..T."""
    spatial = kernel_matrix(kernel, points)
    if spatial.shape[0] == 0:
        return spatial
    return spatial * decay_matrix(spatial.shape[0], eps)


def tv_information(points, kernel: KernelSpec, eps: float, noise_var: float) -> float:
    """Ĩ(f_T; y_T) for points sampled at times 1..T."""
    if len(points) == 0:
        return 0.0
    return mutual_information(tv_gram(points, kernel, eps), noise_var)


def greedy_information_sequence(
    domain, horizon: int, kernel: KernelSpec, eps: float, noise_var: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Uncertainty sampling: at each step pick the domain point with the largest
    posterior variance (lowest index on ties).

    :return: (chosen indices, the variance of each choice just before sampling it)
    """
    _check_noise(noise_var)
    eps = validate_eps(eps)
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    gram = kernel_matrix(kernel, domain)
    if gram.shape[0] == 0:
        raise ConfigError("greedy information needs a non-empty domain")

    posterior = IncrementalPosterior(gram, noise_var=noise_var, eps=eps)
    chosen = np.empty(horizon, dtype=int)
    variances = np.empty(horizon)
    for t in range(horizon):
        _, current = posterior.predict()
        arm = int(np.argmax(current))
        chosen[t] = arm
        variances[t] = current[arm]
        # the value is irrelevant to posterior variances
        posterior.update(arm, 0.0)
    return chosen, variances


def greedy_gamma(
    domain, horizon: int, kernel: KernelSpec, eps: float, noise_var: float
) -> float:
    """
    Lower bound on γ_T (γ̃_T when ε > 0): the information of the uncertainty-sampling
    sequence, ½ Σ log(1 + σ⁻² σ²_{t-1}(x_t)).
    """
    _, variances = greedy_information_sequence(domain, horizon, kernel, eps, noise_var)
    return float(0.5 * np.sum(np.log1p(variances / noise_var)))
