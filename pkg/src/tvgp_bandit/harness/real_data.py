"""
Bandit runs on recorded sensor readings.

Training rows give the kernel (their empirical covariance), the forgetting rate
(maximum likelihood, one segment per day) and the R-GP-UCB block size (cross
validation). The policies then run on the test rows, where f_t is the row of true
readings at step t.

Policies work in model units: readings divided by s = √(raw covariance scale), with
the training column means as prior mean. Regret is reported in raw units.
"""

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from tvgp_bandit.algorithms.beta import PracticalBeta
from tvgp_bandit.algorithms.config import (
    RGPUCB,
    AlgorithmConfig,
    is_auto_block,
    parse_algorithm,
)
from tvgp_bandit.algorithms.policies import run_policy
from tvgp_bandit.algorithms.trace import RegretTrace
from tvgp_bandit.harness.config_dataclass import ExperimentConfig
from tvgp_bandit.harness.results import ResultTable
from tvgp_bandit.harness.sensors import SensorDataset, empirical_covariance
from tvgp_bandit.hyperlearn.fitting import GradientAscent, GridSearch, Search, fit_eps
from tvgp_bandit.hyperlearn.training import TrainingSet
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.kernel.kernels import EmpiricalKernel
from tvgp_bandit.tracking.decorator import track_step_and_log, track_step_and_log_cm
from tvgp_bandit.utils.errors import ConfigError
from tvgp_bandit.utils.utils import make_rng

BLOCK_CANDIDATES = (2, 5, 10, 15, 20, 30, 50, 100)


@dataclass(frozen=True, eq=False)
class ReplayEnvironment:
    """
    Recorded readings as a bandit environment. `readings` and `center` are raw;
    `noise_var` is in model units, `raw_noise_var` in raw units.
    """

    readings: np.ndarray
    gram: np.ndarray
    center: np.ndarray
    scale: float
    eps: float
    raw_noise_var: float
    noise_rng: np.random.Generator
    step: int = 0

    def __post_init__(self):
        readings = np.atleast_2d(np.asarray(self.readings, dtype=float))
        if readings.shape[0] == 0 or np.isnan(readings).any():
            raise ConfigError("replay needs at least one complete row of readings")
        n_arms = readings.shape[1]
        if self.gram.shape[0] != n_arms or self.center.shape[0] != n_arms:
            raise ConfigError("readings, kernel and center disagree on the arm count")
        if not self.scale > 0 or self.raw_noise_var < 0:
            raise ConfigError("scale must be positive and noise variance non-negative")
        object.__setattr__(self, "readings", readings)

    @property
    def noise_var(self) -> float:
        return self.raw_noise_var / self.scale**2

    @property
    def n_arms(self) -> int:
        return self.readings.shape[1]

    @property
    def prior_mean(self) -> np.ndarray:
        return self.center / self.scale

    @property
    def raw_values(self) -> np.ndarray:
        return self.readings[self.step]

    @property
    def values(self) -> np.ndarray:
        return self.raw_values / self.scale

    def _check_arm(self, arm: int) -> None:
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} outside [0, {self.n_arms})")

    def observe(self, arm: int) -> float:
        self._check_arm(arm)
        noise = np.sqrt(self.raw_noise_var) * self.noise_rng.standard_normal()
        return float((self.raw_values[arm] + noise) / self.scale)

    def best_arm(self) -> int:
        return int(np.argmax(self.raw_values))

    def instantaneous_regret(self, arm: int) -> float:
        self._check_arm(arm)
        return float(self.raw_values.max() - self.raw_values[arm])

    def evolve(self) -> "ReplayEnvironment":
        if self.step + 1 >= self.readings.shape[0]:
            raise ConfigError(f"replay ran past its {self.readings.shape[0]} rows")
        return replace(self, step=self.step + 1)


@dataclass(frozen=True, eq=False)
class RealSetup:
    """Everything learned from the training rows."""

    kernel: EmpiricalKernel
    center: np.ndarray
    scale: float
    eps: float
    block: Optional[int]
    train: SensorDataset
    test: SensorDataset

    def environment(
        self, readings: np.ndarray, raw_noise_var: float, noise_rng: np.random.Generator
    ) -> ReplayEnvironment:
        return ReplayEnvironment(
            readings=readings,
            gram=self.kernel.covariance,
            center=self.center,
            scale=self.scale,
            eps=self.eps,
            raw_noise_var=raw_noise_var,
            noise_rng=noise_rng,
        )


def _model_noise(config: ExperimentConfig) -> float:
    """Raw-unit noise variance the policies and the ε fit assume."""
    noise_var = config.assumed_noise_var or config.noise_var
    if not noise_var > 0:
        raise ConfigError("real-data runs need a positive (assumed) noise variance")
    return float(noise_var)


def _search(config: ExperimentConfig) -> Search:
    if config.eps_search == "grid":
        return GridSearch(workers=config.workers)
    return GradientAscent()


def _days(dataset: SensorDataset, rows_per_day: Optional[int]) -> list[np.ndarray]:
    if rows_per_day is None:
        return [dataset.readings]
    labels = dataset.day_labels(rows_per_day)
    return [dataset.readings[labels == day] for day in np.unique(labels)]


def select_block_size(
    windows: Sequence[np.ndarray],
    setup: RealSetup,
    config: ExperimentConfig,
    candidates: Sequence[int] = BLOCK_CANDIDATES,
) -> int:
    """
    Block size of R-GP-UCB with the lowest cumulative regret summed over training
    windows; ties go to the smaller block.
    """
    windows = [window for window in windows if window.shape[0] >= 2]
    if not windows:
        raise ConfigError("block-size cross validation needs a window of >= 2 rows")
    longest = max(window.shape[0] for window in windows)
    usable = sorted({min(n, longest) for n in candidates if n >= 1})
    schedule = PracticalBeta(config.beta_c1, config.beta_c2)
    noise_var = _model_noise(config)
    scores = []
    for n in usable:
        assumed = noise_var / setup.scale**2
        algorithm = AlgorithmConfig(RGPUCB(n), beta=schedule, noise_var=assumed)
        total = 0.0
        for index, window in enumerate(windows):
            noise_rng = make_rng(config.seed, index, "noise")
            env = setup.environment(window, noise_var, noise_rng)
            total += run_policy(env, algorithm, window.shape[0], seed=config.seed).total
        scores.append(total)
        logger.debug(f"block size {n}: cross-validated regret {total:.6g}")
    best = usable[int(np.argmin(scores))]
    logger.info(f"Cross-validated block size N = {best}")
    return best


@track_step_and_log("Learn from training rows")
def prepare_real(config: ExperimentConfig, dataset: SensorDataset) -> RealSetup:
    if config.sensor_ids:
        dataset = dataset.select_sensors(config.sensor_ids)
    train, test = dataset.split(config.train_rows)
    train, dropped = train.drop_incomplete_rows()
    test, dropped_test = test.drop_incomplete_rows()
    if dropped or dropped_test:
        logger.warning(f"dropped {dropped} training and {dropped_test} test rows")
    if test.n_rows < config.horizon:
        raise ConfigError(
            f"test split has {test.n_rows} complete rows, fewer than T = {config.horizon}"
        )

    kernel = empirical_covariance(train)
    center = np.nanmean(train.readings, axis=0)
    scale = float(np.sqrt(kernel.raw_scale))
    days = _days(train, config.rows_per_day)
    locations = np.arange(train.n_sensors)
    panels = [(day - center) / scale for day in days]
    training = TrainingSet.from_panels(panels, locations)
    noise_std = np.sqrt(_model_noise(config)) / scale
    eps = validate_eps(fit_eps(training, kernel, noise_std, _search(config)))

    setup = RealSetup(kernel, center, scale, eps, None, train, test)
    wants_block = any(is_auto_block(parse_algorithm(a)) for a in config.algorithms)
    if wants_block and config.block_size_cv:
        windows = [day[: config.horizon] for day in days]
        setup = replace(setup, block=select_block_size(windows, setup, config))
    return setup


def _algorithms(config: ExperimentConfig, setup: RealSetup) -> list[AlgorithmConfig]:
    noise_var = _model_noise(config) / setup.scale**2
    return [
        replace(algorithm, noise_var=noise_var)
        for algorithm in config.algorithm_configs(setup.kernel, setup.eps, setup.block)
    ]


def run_real(config: ExperimentConfig, dataset: SensorDataset) -> ResultTable:
    """
    Run every configured algorithm on the first T test rows.

    With `first_arms > 0` each trial forces a different initially activated sensor
    (drawn once from the algorithm stream); otherwise trials differ only in noise.
    """
    setup = prepare_real(config, dataset)
    readings = setup.test.readings[: config.horizon]
    n_arms = readings.shape[1]
    if config.first_arms > 0:
        count = min(config.first_arms, n_arms)
        chooser = make_rng(config.seed, 0, "algorithm")
        first_arms: list[Optional[int]] = [
            int(arm) for arm in chooser.choice(n_arms, size=count, replace=False)
        ]
    else:
        first_arms = [None] * config.trials

    traces: dict[str, list[RegretTrace]] = {}
    with track_step_and_log_cm(f"Replay {len(first_arms)} trials on {n_arms} sensors"):
        for trial, first_arm in enumerate(first_arms):
            for algorithm in _algorithms(config, setup):
                env = setup.environment(
                    readings, config.noise_var, make_rng(config.seed, trial, "noise")
                )
                trace = run_policy(
                    env,
                    algorithm,
                    config.horizon,
                    rng=make_rng(config.seed, trial, "algorithm"),
                    seed=config.seed,
                    trial=trial,
                    first_arm=first_arm,
                )
                traces.setdefault(algorithm.label, []).append(trace)
    return ResultTable.from_traces(traces)
