"""
Marginal likelihood of time-stamped data under the time-varying GP, and its
derivative with respect to the forgetting rate ε.

Segments are independent, so both quantities are sums over segments, each with
its own decay matrix D̄_ij = (1-ε)^{|t_i - t_j|/2}.
"""

import math

import numpy as np

from tvgp_bandit.gp_core.cholesky import cho_solve_lower, jittered_cholesky
from tvgp_bandit.hyperlearn.training import TrainingSet
from tvgp_bandit.kernel.decay import (
    decay_derivative_from_times,
    decay_matrix_from_times,
    validate_eps,
)
from tvgp_bandit.kernel.kernels import KernelSpec, kernel_matrix
from tvgp_bandit.utils.errors import ConfigError

_LOG_2PI = math.log(2.0 * math.pi)


def _check_noise(noise_std: float) -> float:
    if not noise_std > 0:
        raise ConfigError(f"noise standard deviation must be positive, got {noise_std}")
    return float(noise_std)


def _segment_factor(part: TrainingSet, kernel: KernelSpec, noise_std: float, eps: float):
    spatial = kernel_matrix(kernel, part.locations)
    covariance = spatial * decay_matrix_from_times(part.times, eps)
    covariance[np.diag_indices_from(covariance)] += noise_std**2
    factor, _ = jittered_cholesky(covariance)
    return spatial, factor


def marginal_log_likelihood(
    data: TrainingSet, kernel: KernelSpec, noise_std: float, eps: float
) -> float:
    """
    log p(ȳ | σ, ε) = -½ ȳᵀ C⁻¹ ȳ - ½ log|C| - (n/2) log 2π with C = K̄∘D̄ + σ²I.

    :param data: Training observations
    :param kernel: Fixed spatial kernel
    :param noise_std: Observation noise standard deviation σ
    :param eps: Forgetting rate ε ∈ [0, 1]
    """
    noise_std = _check_noise(noise_std)
    eps = validate_eps(eps)
    total = 0.0
    for part in data.split():
        _, factor = _segment_factor(part, kernel, noise_std, eps)
        alpha = cho_solve_lower(factor, part.values)
        total += (
            -0.5 * float(part.values @ alpha)
            - float(np.sum(np.log(np.diag(factor))))
            - 0.5 * len(part) * _LOG_2PI
        )
    return total


def mll_grad_eps(
    data: TrainingSet, kernel: KernelSpec, noise_std: float, eps: float
) -> float:
    """
    ∂/∂ε log p = ½ tr((ααᵀ - C⁻¹)(K̄∘D̄′)), α = C⁻¹ȳ,
    D̄′_ij = -v(1-ε)^{v-1}, v = |t_i - t_j|/2.
    """
    noise_std = _check_noise(noise_std)
    eps = validate_eps(eps)
    total = 0.0
    for part in data.split():
        spatial, factor = _segment_factor(part, kernel, noise_std, eps)
        slope = spatial * decay_derivative_from_times(part.times, eps)
        if not np.any(slope):
            continue
        alpha = cho_solve_lower(factor, part.values)
        inverse = cho_solve_lower(factor, np.eye(len(part)))
        total += 0.5 * (float(alpha @ slope @ alpha) - float(np.sum(inverse * slope)))
    return total
