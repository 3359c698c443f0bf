"""
Synthetic experiments: every trial draws one environment path from its derived
seeds and runs each configured algorithm on that same path.

Trials are independent, so they can run in worker processes. Results are merged
by trial index, so the output does not depend on the number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

from loguru import logger
from tqdm import tqdm

from tvgp_bandit.algorithms.policies import run_policy
from tvgp_bandit.algorithms.trace import RegretTrace
from tvgp_bandit.environment.simulator import GridFactor, sample_initial
from tvgp_bandit.harness.config_dataclass import ExperimentConfig
from tvgp_bandit.harness.results import ResultTable
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import AcceptanceFailure, NumericalFailure
from tvgp_bandit.utils.utils import derive_seed, make_rng

MAX_ABORTED_FRACTION = 0.1

# per process: (resolution, dim, box, kernel) -> factor of the grid kernel matrix
_FACTOR_CACHE: dict[tuple, GridFactor] = {}


@dataclass
class TrialOutcome:
    trial: int
    traces: dict[str, RegretTrace] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def aborted(self) -> bool:
        return self.error is not None


def _grid_factor(config: ExperimentConfig) -> GridFactor:
    kernel = config.kernel_spec()
    key = (config.grid_resolution, config.dim, config.box, kernel)
    if key not in _FACTOR_CACHE:
        _FACTOR_CACHE[key] = GridFactor.build(config.grid(), kernel)
    return _FACTOR_CACHE[key]


def run_trial(config: ExperimentConfig, trial: int) -> TrialOutcome:
    """All algorithms on trial `trial`; a numerical failure aborts just this trial."""
    grid, kernel = config.grid(), config.kernel_spec()
    outcome = TrialOutcome(trial=trial)
    try:
        cache = _grid_factor(config)
        for algorithm in config.algorithm_configs(kernel, config.eps):
            env = sample_initial(
                grid,
                kernel,
                config.seed,
                eps=config.eps,
                noise_var=config.noise_var,
                trial=trial,
                cache=cache,
            )
            outcome.traces[algorithm.label] = run_policy(
                env,
                algorithm,
                config.horizon,
                rng=make_rng(config.seed, trial, "algorithm"),
                seed=config.seed,
                trial=trial,
                track_path=config.track_paths,
            )
    except NumericalFailure as e:
        seeds = {
            stream: derive_seed(config.seed, trial, stream).entropy
            for stream in ("env", "noise", "algorithm")
        }
        logger.warning(f"trial {trial} aborted ({e}); derived seeds {seeds}")
        return TrialOutcome(trial=trial, error=str(e))
    if config.track_paths:
        _check_shared_path(outcome)
    return outcome


def _check_shared_path(outcome: TrialOutcome) -> None:
    digests = {trace.path_digest for trace in outcome.traces.values()}
    if len(digests) > 1:
        raise AcceptanceFailure(
            f"trial {outcome.trial}: algorithms saw different environment paths"
        )


@track_step_and_log(lambda config: f"Run {config.trials} synthetic trials")
def run_trials(config: ExperimentConfig) -> list[TrialOutcome]:
    """
    Every trial of `config`, ordered by trial index.

    :raises ConfigError: if two algorithms resolve to the same label
    :raises NumericalFailure: when more than 10% of the trials aborted
    """
    config.algorithm_configs(config.kernel_spec(), config.eps)
    work = partial(run_trial, config)
    trials = range(config.trials)
    progress = dict(total=config.trials, desc="trials", leave=False)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(tqdm(pool.map(work, trials), **progress))
    else:
        outcomes = [work(trial) for trial in tqdm(trials, **progress)]

    aborted = sum(outcome.aborted for outcome in outcomes)
    if aborted > MAX_ABORTED_FRACTION * config.trials:
        raise NumericalFailure(f"{aborted} of {config.trials} trials aborted")
    if aborted:
        logger.warning(f"{aborted} of {config.trials} trials aborted and left out")
    return outcomes


def collect_traces(outcomes: list[TrialOutcome]) -> dict[str, list[RegretTrace]]:
    """Traces per algorithm label, in trial order, skipping aborted trials."""
    merged: dict[str, list[RegretTrace]] = {}
    for outcome in sorted(outcomes, key=lambda o: o.trial):
        for label, trace in outcome.traces.items():
            merged.setdefault(label, []).append(trace)
    return merged


def run_synthetic(config: ExperimentConfig) -> ResultTable:
    return ResultTable.from_traces(collect_traces(run_trials(config)))
