"""
Simulator for the Markov time-varying reward model on a finite grid.

f_1 = g_1 and f_{t+1} = √(1-ε)·f_t + √ε·g_{t+1}, where each g is an independent
draw from GP(0, k) restricted to the grid. Draws reuse one cached Cholesky factor
of the grid kernel matrix.

The environment path and the observation noise come from separate random streams,
so every policy run on the same (seed, trial) sees the same f_t and the same noise
sequence.
"""

from dataclasses import dataclass, replace
from typing import Optional, Protocol

import numpy as np

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.gp_core.cholesky import jittered_cholesky
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.kernel.kernels import KernelSpec, kernel_matrix
from tvgp_bandit.utils.errors import ConfigError
from tvgp_bandit.utils.utils import make_rng

GRID_JITTER_LADDER = (1e-8, 1e-6)


class BanditEnvironment(Protocol):
    """What a policy needs from an environment, simulated or replayed."""

    eps: float
    noise_var: float

    @property
    def n_arms(self) -> int: ...

    @property
    def gram(self) -> np.ndarray: ...

    @property
    def prior_mean(self) -> np.ndarray: ...

    @property
    def values(self) -> np.ndarray: ...

    def observe(self, arm: int) -> float: ...

    def best_arm(self) -> int: ...

    def instantaneous_regret(self, arm: int) -> float: ...

    def evolve(self) -> "BanditEnvironment": ...


@dataclass(frozen=True, eq=False)
class GridFactor:
    """Kernel matrix of a grid and its jittered lower Cholesky factor."""

    gram: np.ndarray
    factor: np.ndarray
    jitter: float

    @classmethod
    def build(cls, grid: DomainGrid, kernel: KernelSpec) -> "GridFactor":
        gram = kernel_matrix(kernel, grid.arm_locations())
        factor, jitter = jittered_cholesky(gram, ladder=GRID_JITTER_LADDER)
        return cls(gram=gram, factor=factor, jitter=jitter)


@dataclass(frozen=True, eq=False)
class FunctionSnapshot:
    values: np.ndarray
    time: int


@dataclass(frozen=True, eq=False)
class EnvState:
    """
    Hidden function at the current step plus everything needed to evolve it.

    The random generators are shared with the states `evolve` returns, so a state
    is consumed by evolving it: keep using the returned one.
    """

    grid: DomainGrid
    kernel: KernelSpec
    eps: float
    noise_var: float
    snapshot: FunctionSnapshot
    cache: GridFactor
    env_rng: np.random.Generator
    noise_rng: np.random.Generator

    @property
    def n_arms(self) -> int:
        return self.grid.size

    @property
    def gram(self) -> np.ndarray:
        return self.cache.gram

    @property
    def prior_mean(self) -> np.ndarray:
        return np.zeros(self.n_arms)

    @property
    def time(self) -> int:
        return self.snapshot.time

    @property
    def values(self) -> np.ndarray:
        return self.snapshot.values

    def _check_arm(self, arm: int) -> None:
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} outside [0, {self.n_arms})")

    def evolve(self) -> "EnvState":
        fresh = self.cache.factor @ self.env_rng.standard_normal(self.n_arms)
        kept = np.sqrt(1.0 - self.eps) * self.snapshot.values
        values = kept + np.sqrt(self.eps) * fresh
        return replace(self, snapshot=FunctionSnapshot(values, self.snapshot.time + 1))

    def observe(self, arm: int) -> float:
        self._check_arm(arm)
        noise = np.sqrt(self.noise_var) * self.noise_rng.standard_normal()
        return float(self.snapshot.values[arm] + noise)

    def best_arm(self) -> int:
        return int(np.argmax(self.snapshot.values))

    def instantaneous_regret(self, arm: int) -> float:
        self._check_arm(arm)
        values = self.snapshot.values
        return float(values.max() - values[arm])


def sample_initial(
    grid: DomainGrid,
    kernel: KernelSpec,
    seed: int,
    eps: float = 0.0,
    noise_var: float = 0.0,
    trial: int = 0,
    cache: Optional[GridFactor] = None,
) -> EnvState:
    """
    Draw f_1 = L·z for the given (seed, trial).

    :param grid: Finite domain
    :param kernel: Spatial kernel of the reward model
    :param seed: Master seed
    :param eps: True forgetting rate ε
    :param noise_var: Observation noise variance σ² (0 gives exact observations)
    :param trial: Trial index mixed into the derived seeds
    :param cache: Precomputed grid factor, shared between trials of one experiment
    :return: The environment at step 1
    """
    eps = validate_eps(eps)
    if noise_var < 0:
        raise ConfigError(f"noise variance must be non-negative, got {noise_var}")
    cache = cache or GridFactor.build(grid, kernel)
    env_rng = make_rng(seed, trial, "env")
    noise_rng = make_rng(seed, trial, "noise")
    values = cache.factor @ env_rng.standard_normal(grid.size)
    return EnvState(
        grid=grid,
        kernel=kernel,
        eps=eps,
        noise_var=float(noise_var),
        snapshot=FunctionSnapshot(values, 1),
        cache=cache,
        env_rng=env_rng,
        noise_rng=noise_rng,
    )


def evolve(state: EnvState) -> EnvState:
    return state.evolve()


def observe(state: EnvState, arm_index: int) -> float:
    return state.observe(arm_index)


def instantaneous_regret(state: EnvState, arm_index: int) -> float:
    return state.instantaneous_regret(arm_index)


def simulate_panel(
    grid: DomainGrid,
    kernel: KernelSpec,
    eps: float,
    steps: int,
    seed: int,
    trial: int = 0,
    cache: Optional[GridFactor] = None,
) -> np.ndarray:
    """f_1..f_steps of one path as a (steps, arms) matrix, as if every arm were read."""
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    state = sample_initial(grid, kernel, seed, eps=eps, trial=trial, cache=cache)
    rows = [state.values]
    for _ in range(steps - 1):
        state = state.evolve()
        rows.append(state.values)
    return np.vstack(rows)
