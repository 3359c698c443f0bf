"""
Full-information genie: at step t it knows f_{t-1} exactly and plays its maximizer.
Its regret comes only from the drift between consecutive steps, which is what the
Ω(Tε) lower bound measures.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.environment.simulator import GridFactor, sample_initial
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.kernel.kernels import KernelSpec
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import ConfigError


def genie_trial(
    grid: DomainGrid,
    kernel: KernelSpec,
    eps: float,
    horizon: int,
    seed: int,
    trial: int = 0,
    cache: Optional[GridFactor] = None,
) -> np.ndarray:
    """Per-step regret of the genie for steps 2..T of one environment path."""
    if horizon < 2:
        raise ConfigError(f"the genie needs a horizon of at least 2, got {horizon}")
    env = sample_initial(grid, kernel, seed, eps=eps, trial=trial, cache=cache)
    regrets = np.empty(horizon - 1)
    for t in range(horizon - 1):
        choice = env.best_arm()
        env = env.evolve()
        regrets[t] = env.instantaneous_regret(choice)
    return regrets


@track_step_and_log("Genie baseline")
def genie_baseline(
    grid: DomainGrid,
    kernel: KernelSpec,
    eps_values: Sequence[float],
    horizon: int,
    trials: int,
    seed: int = 0,
    progress: Optional[bool] = None,
) -> pd.DataFrame:
    """
    Mean per-step regret r̄(ε) of the genie for each ε.

    Trial i uses the same environment stream for every ε, so the sweep compares
    paths driven by identical innovations.

    :return: Table with columns eps, mean_regret, std_error, trials
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    cache = GridFactor.build(grid, kernel)
    rows = []
    for eps in eps_values:
        eps = validate_eps(eps)
        per_trial = np.array(
            [
                genie_trial(grid, kernel, eps, horizon, seed, trial, cache).mean()
                for trial in tqdm(
                    range(trials), desc=f"genie ε={eps:g}", disable=not progress,
                    leave=False,
                )
            ]
        )
        spread = per_trial.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
        rows.append(
            {
                "eps": eps,
                "mean_regret": float(per_trial.mean()),
                "std_error": float(spread),
                "trials": trials,
            }
        )
        logger.debug(f"genie ε={eps:g}: r̄={rows[-1]['mean_regret']:.6g}")
    return pd.DataFrame(rows, columns=["eps", "mean_regret", "std_error", "trials"])


def loglog_slope(eps_values: Sequence[float], regrets: Sequence[float]) -> float:
    """Least-squares slope of log r̄ against log ε."""
    eps = np.asarray(eps_values, dtype=float)
    regrets = np.asarray(regrets, dtype=float)
    if eps.size < 2 or eps.shape != regrets.shape:
        raise ConfigError("need at least two (ε, r̄) pairs of matching length")
    if np.any(eps <= 0) or np.any(regrets <= 0):
        raise ConfigError("log-log slope needs strictly positive ε and r̄")
    slope, _ = np.polyfit(np.log(eps), np.log(regrets), 1)
    return float(slope)
