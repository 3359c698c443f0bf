"""
Bandit policies over a finite arm set.

Every UCB variant runs the same loop: predict all arms, score μ + √β_t·σ, pick the
argmax (lowest index on ties), observe, update, and let the environment evolve.
They differ only in the posterior they keep:

- GP-UCB conditions on all history with the time-invariant model
- R-GP-UCB does the same but forgets everything before step t when (t-1) mod N = 0
- TV-GP-UCB conditions on all history with the time-varying model and ε̂
"""

import hashlib
import math
from typing import Optional

import numpy as np

from tvgp_bandit.algorithms.beta import beta
from tvgp_bandit.algorithms.config import (
    GPUCB,
    RGPUCB,
    TVGPUCB,
    AlgorithmConfig,
    Oracle,
    RandomPolicy,
)
from tvgp_bandit.algorithms.trace import RegretTrace
from tvgp_bandit.environment.simulator import BanditEnvironment
from tvgp_bandit.gp_core.posterior import IncrementalPosterior
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.kernel.kernels import (
    KernelSpec,
    Matern,
    SquaredExponential,
    matern_growth_exponent,
)
from tvgp_bandit.utils.errors import ConfigError


def ucb_select(means: np.ndarray, stds: np.ndarray, beta_t: float) -> int:
    """argmax of μ + √β·σ; `np.argmax` returns the lowest index on ties."""
    means = np.asarray(means, dtype=float)
    stds = np.asarray(stds, dtype=float)
    if means.size == 0:
        raise ConfigError("cannot select from an empty arm set")
    if means.shape != stds.shape:
        raise ConfigError(f"means {means.shape} and stds {stds.shape} differ in shape")
    if beta_t < 0:
        raise ConfigError(f"beta must be non-negative, got {beta_t}")
    return int(np.argmax(means + np.sqrt(beta_t) * stds))


class _PathHasher:
    def __init__(self, enabled: bool):
        self._hash = hashlib.sha256() if enabled else None

    def add(self, env: BanditEnvironment) -> None:
        if self._hash is not None:
            self._hash.update(np.ascontiguousarray(env.values).tobytes())

    def digest(self) -> Optional[str]:
        return self._hash.hexdigest() if self._hash is not None else None


def _assumed_noise(env: BanditEnvironment, config: AlgorithmConfig) -> float:
    noise_var = config.noise_var if config.noise_var is not None else env.noise_var
    if not noise_var > 0:
        raise ConfigError(
            "UCB policies need a positive assumed noise variance; set one in the "
            "algorithm config when the environment is noiseless"
        )
    return float(noise_var)


def _run_ucb(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    eps: float,
    block: Optional[int],
    seed: int,
    trial: int,
    first_arm: Optional[int],
    track_path: bool,
) -> RegretTrace:
    posterior = IncrementalPosterior(
        env.gram,
        noise_var=_assumed_noise(env, config),
        eps=eps,
        prior_mean=env.prior_mean,
    )
    arms = np.empty(horizon, dtype=int)
    observations = np.empty(horizon)
    regrets = np.empty(horizon)
    hasher = _PathHasher(track_path)
    largest = 0

    for t in range(1, horizon + 1):
        if block is not None and (t - 1) % block == 0:
            posterior.reset()
        largest = max(largest, posterior.size)
        if t == 1 and first_arm is not None:
            arm = first_arm
        else:
            means, variances = posterior.predict()
            arm = ucb_select(means, np.sqrt(variances), beta(config.beta, t))

        hasher.add(env)
        arms[t - 1] = arm
        observations[t - 1] = env.observe(arm)
        regrets[t - 1] = env.instantaneous_regret(arm)
        posterior.update(arm, observations[t - 1])
        if t < horizon:
            env = env.evolve()

    return RegretTrace(
        label=config.label,
        arms=arms,
        observations=observations,
        regrets=regrets,
        seed=seed,
        trial=trial,
        max_posterior_size=largest,
        path_digest=hasher.digest(),
    )


def _expect(config: AlgorithmConfig, kind: type) -> None:
    if not isinstance(config.variant, kind):
        raise ConfigError(
            f"expected a {kind.__name__} config, got {type(config.variant).__name__}"
        )


def run_gp_ucb(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    _expect(config, GPUCB)
    return _run_ucb(env, config, horizon, 0.0, None, seed, trial, first_arm, track_path)


def run_r_gp_ucb(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    _expect(config, RGPUCB)
    block = config.variant.block_size  # type: ignore[union-attr]
    if block < 1:
        raise ConfigError("R-GP-UCB block size was never resolved")
    return _run_ucb(env, config, horizon, 0.0, block, seed, trial, first_arm, track_path)


def run_tv_gp_ucb(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    _expect(config, TVGPUCB)
    assumed = config.variant.assumed_eps  # type: ignore[union-attr]
    eps = validate_eps(env.eps if assumed is None else assumed)
    return _run_ucb(env, config, horizon, eps, None, seed, trial, first_arm, track_path)


def _run_direct(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    choose,
    seed: int,
    trial: int,
    first_arm: Optional[int],
    track_path: bool,
) -> RegretTrace:
    arms = np.empty(horizon, dtype=int)
    observations = np.empty(horizon)
    regrets = np.empty(horizon)
    hasher = _PathHasher(track_path)
    for t in range(1, horizon + 1):
        arm = first_arm if (t == 1 and first_arm is not None) else choose(env)
        hasher.add(env)
        arms[t - 1] = arm
        observations[t - 1] = env.observe(arm)
        regrets[t - 1] = env.instantaneous_regret(arm)
        if t < horizon:
            env = env.evolve()
    return RegretTrace(
        label=config.label,
        arms=arms,
        observations=observations,
        regrets=regrets,
        seed=seed,
        trial=trial,
        path_digest=hasher.digest(),
    )


def run_random(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    rng: np.random.Generator,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    """Uniform arm each step, drawn from the algorithm's own random stream."""
    _expect(config, RandomPolicy)
    n_arms = env.n_arms
    return _run_direct(
        env,
        config,
        horizon,
        lambda _env: int(rng.integers(n_arms)),
        seed,
        trial,
        first_arm,
        track_path,
    )


def run_oracle(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    _expect(config, Oracle)
    return _run_direct(
        env, config, horizon, lambda e: e.best_arm(), seed, trial, first_arm, track_path
    )


def run_policy(
    env: BanditEnvironment,
    config: AlgorithmConfig,
    horizon: int,
    rng: Optional[np.random.Generator] = None,
    seed: int = 0,
    trial: int = 0,
    first_arm: Optional[int] = None,
    track_path: bool = False,
) -> RegretTrace:
    """Run whichever policy `config.variant` names."""
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    if first_arm is not None and not 0 <= first_arm < env.n_arms:
        raise ConfigError(f"first arm {first_arm} outside [0, {env.n_arms})")
    options = dict(seed=seed, trial=trial, first_arm=first_arm, track_path=track_path)
    variant = config.variant
    if isinstance(variant, TVGPUCB):
        return run_tv_gp_ucb(env, config, horizon, **options)
    if isinstance(variant, RGPUCB):
        return run_r_gp_ucb(env, config, horizon, **options)
    if isinstance(variant, GPUCB):
        return run_gp_ucb(env, config, horizon, **options)
    if isinstance(variant, RandomPolicy):
        if rng is None:
            raise ConfigError("the random policy needs an algorithm random generator")
        return run_random(env, config, horizon, rng, **options)
    if isinstance(variant, Oracle):
        return run_oracle(env, config, horizon, **options)
    raise ConfigError(f"unknown algorithm variant {variant!r}")


def block_size(kernel: KernelSpec, eps: float, horizon: int, dim: int = 2) -> int:
    """
    R-GP-UCB block length: ⌈min(T, 12·ε^{-1/4})⌉ for SE and
    ⌈min(T, 24·ε^{-1/(4-c)})⌉ for Matérn, with c the Matérn growth exponent.
    ε = 0 gives T.
    """
    eps = validate_eps(eps)
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    if eps == 0.0:
        return horizon
    if isinstance(kernel, SquaredExponential):
        length = 12.0 * eps ** (-0.25)
    elif isinstance(kernel, Matern):
        c = matern_growth_exponent(kernel.nu, dim)
        length = 24.0 * eps ** (-1.0 / (4.0 - c))
    else:
        raise ConfigError("the block-size rule covers SE and Matérn kernels only")
    # round first so e.g. 12·(1e-4)^{-1/4} = 120.00000000000001 maps to 120
    return max(1, math.ceil(round(min(float(horizon), length), 9)))
