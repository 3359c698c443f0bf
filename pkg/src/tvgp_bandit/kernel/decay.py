"""
Temporal decay factors of the Markov time-varying model.

Under f_{t+1} = √(1-ε)·f_t + √ε·g_{t+1} the covariance between the function at two
times m steps apart is (1-ε)^{m/2}·k(x, x'). The decay matrix D and decay vector d
turn a spatial kernel matrix into the time-varying one via the Hadamard product.
"""

import numpy as np

from tvgp_bandit.utils.errors import ConfigError


def validate_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0 or np.isnan(eps):
        raise ConfigError(f"epsilon must lie in [0, 1], got {eps}")
    return eps


def decay_factor(gaps, eps: float) -> np.ndarray:
    """
    (1-ε)^{m/2} for an array of non-negative gaps m.

    Computed as exp((m/2)·log1p(-ε)) for ε ∈ (0, 1); ε = 0 gives all ones and
    ε = 1 gives 1 at zero gap and 0 elsewhere.
    """
    eps = validate_eps(eps)
    gaps = np.abs(np.asarray(gaps, dtype=float))
    if eps == 0.0:
        return np.ones_like(gaps)
    if eps == 1.0:
        return (gaps == 0.0).astype(float)
    return np.exp(0.5 * gaps * np.log1p(-eps))


def decay_matrix_from_times(times, eps: float) -> np.ndarray:
    """D_ij = (1-ε)^{|t_i - t_j|/2} for arbitrary (possibly repeated) time stamps."""
    times = np.asarray(times, dtype=float).reshape(-1)
    return decay_factor(times[:, None] - times[None, :], eps)


def decay_vector_from_times(times, eps: float, query_time: float) -> np.ndarray:
    """d_i = (1-ε)^{|query_time - t_i|/2}."""
    times = np.asarray(times, dtype=float).reshape(-1)
    return decay_factor(query_time - times, eps)


def decay_matrix(t: int, eps: float) -> np.ndarray:
    """t×t decay matrix over the steps 1..t."""
    if t < 1:
        raise ConfigError(f"decay matrix size must be >= 1, got {t}")
    return decay_matrix_from_times(np.arange(1, t + 1), eps)


def decay_vector(t: int, eps: float) -> np.ndarray:
    """Decay from steps 1..t to step t+1: entries (1-ε)^{(t+1-i)/2}."""
    if t < 1:
        raise ConfigError(f"decay vector length must be >= 1, got {t}")
    return decay_vector_from_times(np.arange(1, t + 1), eps, t + 1)


def decay_derivative_from_times(times, eps: float) -> np.ndarray:
    """
    Entrywise ∂D/∂ε = -v·(1-ε)^{v-1} with v = |t_i - t_j|/2, and 0 where v = 0.

    Only defined for ε ∈ [0, 1); at ε = 1 the derivative blows up for v < 1.
    """
    eps = validate_eps(eps)
    if eps == 1.0:
        raise ConfigError("decay derivative is undefined at epsilon = 1")
    times = np.asarray(times, dtype=float).reshape(-1)
    v = 0.5 * np.abs(times[:, None] - times[None, :])
    out = np.zeros_like(v)
    nonzero = v > 0.0
    out[nonzero] = -v[nonzero] * np.exp((v[nonzero] - 1.0) * np.log1p(-eps))
    return out
