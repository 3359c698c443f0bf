"""
Numerical checks of the inequalities behind the regret bounds.

Each checker evaluates one inequality on one concrete instance and reports its
margin (bound minus realized value; non-negative means the inequality held).
`run_check_suite` draws random instances from per-instance derived seeds and
keeps every failing instance so it can be replayed.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from tvgp_bandit.gp_core.information import mutual_information, tv_information
from tvgp_bandit.gp_core.posterior import ObservationHistory, tv_posterior_batch
from tvgp_bandit.kernel.decay import decay_matrix, validate_eps
from tvgp_bandit.kernel.kernels import (
    KernelSpec,
    Matern,
    SquaredExponential,
    kernel_matrix,
)
from tvgp_bandit.tracking.decorator import track_step_and_log
from tvgp_bandit.utils.errors import ConfigError
from tvgp_bandit.utils.utils import make_rng

# Largest analysis block for which γ_Ñ is found by enumerating point multisets.
MAX_ENUMERATION_BLOCK = 8
_SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    margins: dict[str, float]
    instance: dict[str, Any] = field(default_factory=dict)


def frobenius_bound_check(
    points, n_tilde: int, eps: float, kernel: KernelSpec
) -> CheckResult:
    """‖K∘D - K‖_F ≤ Ñ²ε on the first Ñ points, sampled at consecutive steps."""
    eps = validate_eps(eps)
    points = np.asarray(points)
    if not 1 <= n_tilde <= len(points):
        raise ConfigError(f"need 1 <= Ñ <= {len(points)}, got {n_tilde}")
    spatial = kernel_matrix(kernel, points[:n_tilde])
    gap = spatial * decay_matrix(n_tilde, eps) - spatial
    norm = float(np.linalg.norm(gap, "fro"))
    bound = n_tilde**2 * eps
    return CheckResult(
        name="frobenius",
        passed=norm <= bound + _SLACK,
        margins={"frobenius": bound - norm},
        instance={"n_tilde": n_tilde, "eps": eps},
    )


def exact_gamma(domain, size: int, kernel: KernelSpec, noise_var: float) -> float:
    """γ_size over a finite domain by enumerating every multiset of `size` points."""
    if size > MAX_ENUMERATION_BLOCK:
        raise ConfigError(
            f"exact γ enumeration is limited to Ñ <= {MAX_ENUMERATION_BLOCK}, got {size}"
        )
    gram = kernel_matrix(kernel, domain)
    best = 0.0
    for subset in combinations_with_replacement(range(gram.shape[0]), size):
        chosen = np.array(subset)
        best = max(best, mutual_information(gram[np.ix_(chosen, chosen)], noise_var))
    return best


def _drift_term(block: int, n_tilde: int, eps: float, noise_var: float) -> float:
    # Weyl: every eigenvalue of K∘D moves by at most ‖K∘D - K‖₂ ≤ Ñ²ε
    return 0.5 * block * np.log1p(n_tilde**2 * eps / noise_var)


def mi_split_bound_check(
    domain,
    sequence,
    eps: float,
    n_tilde: int,
    noise_var: float,
    kernel: KernelSpec,
    exact: bool = True,
) -> CheckResult:
    """
    Check that splitting T steps into blocks of Ñ bounds the time-varying
    information:

    - exact: Ĩ(f_T; y_T) ≤ (T/Ñ + 1)(γ_Ñ + Ñ³ε) with γ_Ñ enumerated over `domain`
      (Ñ ≤ 8)
    - otherwise: Ĩ ≤ Σ_blocks Ĩ_block and, per block, Ĩ_block ≤ I_block + |b|·Ñ²ε

    The eigenvalue-perturbation form ½Ñ·log(1 + σ⁻²Ñ²ε) of the drift term is
    reported as an extra margin but does not decide the outcome.

    :param domain: Finite candidate points
    :param sequence: Indices into `domain` of the points sampled at steps 1..T
    """
    eps = validate_eps(eps)
    domain = np.asarray(domain)
    sequence = np.asarray(sequence, dtype=int)
    horizon = sequence.size
    if horizon < 1 or not 1 <= n_tilde <= horizon:
        raise ConfigError(f"need 1 <= Ñ <= T, got Ñ={n_tilde}, T={horizon}")
    points = domain[sequence]
    total = tv_information(points, kernel, eps, noise_var)
    instance = {"eps": eps, "n_tilde": n_tilde, "noise_var": noise_var,
                "sequence": sequence.tolist()}

    if exact:
        gamma = exact_gamma(domain, n_tilde, kernel, noise_var)
        blocks = horizon / n_tilde + 1.0
        bound = blocks * (gamma + n_tilde**3 * eps)
        weyl = blocks * (gamma + _drift_term(n_tilde, n_tilde, eps, noise_var))
        return CheckResult(
            name="mi_split",
            passed=total <= bound + _SLACK,
            margins={"split": bound - total, "weyl_form": weyl - total},
            instance=instance,
        )

    blockwise = 0.0
    worst_block = worst_weyl = np.inf
    for start in range(0, horizon, n_tilde):
        block_points = points[start : start + n_tilde]
        size = len(block_points)
        block_tv = tv_information(block_points, kernel, eps, noise_var)
        block_static = mutual_information(kernel_matrix(kernel, block_points), noise_var)
        allowance = block_static + size * n_tilde**2 * eps
        weyl = block_static + _drift_term(size, n_tilde, eps, noise_var)
        worst_block = min(worst_block, allowance - block_tv)
        worst_weyl = min(worst_weyl, weyl - block_tv)
        blockwise += block_tv
    return CheckResult(
        name="mi_split",
        passed=total <= blockwise + _SLACK and worst_block >= -_SLACK,
        margins={
            "chain_rule": blockwise - total,
            "per_block": float(worst_block),
            "weyl_per_block": float(worst_weyl),
        },
        instance=instance,
    )


def mismatch_bounds_check(
    history: ObservationHistory,
    block: int,
    eps: float,
    kernel: KernelSpec,
    queries,
    lag: float = 0.0,
) -> CheckResult:
    """
    Gap between the time-varying and the time-invariant posterior on the same
    history of at most N samples:

        sup |μ̃ - μ| ≤ (σ⁻² + σ⁻⁴)·N³·ε·L̃ with L̃ = max |y|
        sup |σ̃ - σ| ≤ √((3σ⁻² + σ⁻⁴)·N³·ε)

    The query time is `lag` steps after the last sample; the history plus the
    query must span at most N steps.
    """
    eps = validate_eps(eps)
    n = len(history)
    if n > block or (n and history.last_time - history.records[0].time + lag >= block):
        raise ConfigError(f"history of {n} samples does not fit in a block of {block}")
    tv_mean, tv_var = tv_posterior_batch(history, kernel, eps, queries, lag=lag)
    ti_mean, ti_var = tv_posterior_batch(history, kernel, 0.0, queries, lag=lag)
    mean_gap = float(np.max(np.abs(tv_mean - ti_mean)))
    std_gap = float(np.max(np.abs(np.sqrt(tv_var) - np.sqrt(ti_var))))

    inv = 1.0 / history.noise_var
    largest = float(np.max(np.abs(history.values))) if n else 0.0
    drift = block**3 * eps
    mean_bound = (inv + inv**2) * drift * largest
    std_bound = float(np.sqrt((3.0 * inv + inv**2) * drift))
    return CheckResult(
        name="mismatch",
        passed=mean_gap <= mean_bound + _SLACK and std_gap <= std_bound + _SLACK,
        margins={"mean": mean_bound - mean_gap, "std": std_bound - std_gap},
        instance={"block": block, "eps": eps, "noise_var": history.noise_var},
    )


def _random_kernel(rng: np.random.Generator) -> KernelSpec:
    lengthscale = float(rng.uniform(0.05, 1.0))
    if rng.random() < 0.5:
        return SquaredExponential(lengthscale)
    return Matern(lengthscale, nu=float(rng.choice([0.5, 1.5, 2.5])))


def _frobenius_instance(rng: np.random.Generator) -> CheckResult:
    n_tilde = int(rng.integers(1, 31))
    eps = float(rng.uniform(0.0, 0.2))
    points = rng.uniform(size=(n_tilde, 2))
    return frobenius_bound_check(points, n_tilde, eps, _random_kernel(rng))


def _mi_split_instance(rng: np.random.Generator) -> CheckResult:
    domain = rng.uniform(size=(int(rng.integers(2, 6)), 2))
    horizon = int(rng.integers(2, 17))
    n_tilde = int(rng.integers(1, min(horizon, 4) + 1))
    sequence = rng.integers(0, len(domain), size=horizon)
    eps = float(rng.uniform(0.0, 0.2))
    noise_var = float(rng.uniform(0.05, 2.0))
    return mi_split_bound_check(
        domain, sequence, eps, n_tilde, noise_var, _random_kernel(rng)
    )


def _mi_split_blockwise_instance(rng: np.random.Generator) -> CheckResult:
    horizon = int(rng.integers(10, 41))
    n_tilde = int(rng.integers(9, horizon + 1))
    domain = rng.uniform(size=(horizon, 2))
    eps = float(rng.uniform(0.0, 0.2))
    noise_var = float(rng.uniform(0.05, 2.0))
    return mi_split_bound_check(
        domain, np.arange(horizon), eps, n_tilde, noise_var, _random_kernel(rng),
        exact=False,
    )


def _mismatch_instance(rng: np.random.Generator) -> CheckResult:
    block = int(rng.integers(1, 21))
    eps = float(rng.uniform(0.0, 0.1))
    noise_var = float(rng.uniform(0.05, 2.0))
    points = rng.uniform(size=(block, 2))
    values = rng.standard_normal(block)
    history = ObservationHistory.from_arrays(noise_var, points, values)
    queries = rng.uniform(size=(20, 2))
    return mismatch_bounds_check(history, block, eps, _random_kernel(rng), queries)


CHECKS: dict[str, Callable[[np.random.Generator], CheckResult]] = {
    "frobenius": _frobenius_instance,
    "mi_split": _mi_split_instance,
    "mi_split_blockwise": _mi_split_blockwise_instance,
    "mismatch": _mismatch_instance,
}


@dataclass
class SuiteResult:
    name: str
    results: list[CheckResult]

    @property
    def failures(self) -> list[CheckResult]:
        return [result for result in self.results if not result.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict[str, Any]:
        margins = pd.DataFrame([result.margins for result in self.results])
        return {
            "check": self.name,
            "instances": len(self.results),
            "violations": len(self.failures),
            "min_margin": float(margins.min().min()) if not margins.empty else np.nan,
        }


@track_step_and_log(lambda name, *args, **kwargs: f"Check suite {name}")
def run_check_suite(
    name: str, instances: int = 200, seed: int = 0, progress: Optional[bool] = None
) -> SuiteResult:
    """Run `instances` random instances of one checker, each from its own seed."""
    if name not in CHECKS:
        raise ConfigError(f"unknown check '{name}', expected one of {sorted(CHECKS)}")
    make_instance = CHECKS[name]
    results = []
    for index in tqdm(range(instances), desc=name, disable=not progress, leave=False):
        result = make_instance(make_rng(seed, index, "check"))
        result.instance.update({"seed": seed, "index": index})
        if not result.passed:
            logger.warning(f"{name} violated on {result.instance}: {result.margins}")
        results.append(result)
    return SuiteResult(name=name, results=results)
