from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from loguru import logger
from scipy.optimize import minimize_scalar

from tvgp_bandit.hyperlearn.likelihood import marginal_log_likelihood, mll_grad_eps
from tvgp_bandit.hyperlearn.training import TrainingSet
from tvgp_bandit.kernel.kernels import KernelSpec
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import ConfigError

EPS_FLOOR = 1e-6
EPS_CEILING = 1.0 - 1e-6


@dataclass(frozen=True)
class GridSearch:
    """
    Evaluate the likelihood on `resolution` equally spaced ε in [0, 1]. With
    `refine`, polish the best grid point by a bounded scalar search between its
    neighbours.
    """

    resolution: int = 101
    refine: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.resolution < 2:
            raise ConfigError(f"grid resolution must be >= 2, got {self.resolution}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class GradientAscent:
    """Projected gradient ascent on ε with an adaptive step length."""

    step: float = 1e-3
    iters: int = 500
    tol: float = 1e-7
    initial: float = 0.05

    def __post_init__(self):
        if not (self.step > 0 and self.tol > 0 and self.iters >= 1):
            raise ConfigError("ascent step, tol and iters must be positive")
        if not EPS_FLOOR <= self.initial <= EPS_CEILING:
            raise ConfigError(f"initial ε must lie in [{EPS_FLOOR}, {EPS_CEILING}]")


Search = Union[GridSearch, GradientAscent]


def _grid_search(
    data: TrainingSet, kernel: KernelSpec, noise_std: float, search: GridSearch
) -> float:
    grid = np.linspace(0.0, 1.0, search.resolution)

    def objective(eps: float) -> float:
        return marginal_log_likelihood(data, kernel, noise_std, eps)

    if search.workers > 1:
        # map keeps input order, so the argmax is the same as in the serial path
        with ThreadPoolExecutor(max_workers=search.workers) as pool:
            scores = np.array(list(pool.map(objective, grid)))
    else:
        scores = np.array([objective(eps) for eps in grid])
    best = int(np.argmax(scores))
    if not search.refine:
        return float(grid[best])

    low = grid[max(best - 1, 0)]
    high = grid[min(best + 1, grid.size - 1)]
    polished = minimize_scalar(
        lambda eps: -objective(eps),
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-8},
    )
    if polished.success and -polished.fun >= scores[best]:
        return float(np.clip(polished.x, 0.0, 1.0))
    return float(grid[best])


def _gradient_ascent(
    data: TrainingSet, kernel: KernelSpec, noise_std: float, search: GradientAscent
) -> float:
    eps = search.initial
    value = marginal_log_likelihood(data, kernel, noise_std, eps)
    step = search.step
    for _ in range(search.iters):
        gradient = mll_grad_eps(data, kernel, noise_std, eps)
        if gradient == 0.0:
            break
        # shrink until the projected step improves the likelihood
        while step > 1e-16:
            candidate = float(np.clip(eps + step * gradient, EPS_FLOOR, EPS_CEILING))
            candidate_value = marginal_log_likelihood(data, kernel, noise_std, candidate)
            if candidate_value > value:
                break
            step *= 0.5
        else:
            break
        moved = abs(candidate - eps)
        eps, value = candidate, candidate_value
        step *= 2.0
        if moved < search.tol:
            break
    else:
        logger.warning(f"ε ascent stopped after {search.iters} iterations at {eps:.6g}")
    return eps


@track_step_and_log("Fit forgetting rate")
def fit_eps(
    data: TrainingSet,
    kernel: KernelSpec,
    noise_std: float,
    search: Search = GridSearch(),
) -> float:
    """
    Maximum-likelihood ε for fixed spatial kernel and noise.

    :raises IdentifiabilityError: with fewer than 2 observations or without two
        distinct time stamps inside some segment
    """
    data.check_identifiable()
    if isinstance(search, GridSearch):
        eps = _grid_search(data, kernel, noise_std, search)
    else:
        eps = _gradient_ascent(data, kernel, noise_std, search)
    logger.info(f"Fitted ε = {eps:.6g}")
    return eps


def fit_eps_and_noise(
    data: TrainingSet,
    kernel: KernelSpec,
    noise_stds: Sequence[float],
    search: Search = GridSearch(),
) -> tuple[float, float]:
    """Profile likelihood over a grid of noise levels; returns (ε̂, σ̂)."""
    if len(noise_stds) == 0:
        raise ConfigError("need at least one candidate noise level")
    best: tuple[float, float, float] = (-np.inf, 0.0, 0.0)
    for noise_std in noise_stds:
        eps = fit_eps(data, kernel, noise_std, search)
        score = marginal_log_likelihood(data, kernel, noise_std, eps)
        if score > best[0]:
            best = (score, eps, float(noise_std))
    return best[1], best[2]
