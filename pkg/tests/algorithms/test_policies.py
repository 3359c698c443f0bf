import math

import numpy as np
import pytest
from scipy import stats

from tvgp_bandit.algorithms.config import (
    GPUCB,
    RGPUCB,
    TVGPUCB,
    AlgorithmConfig,
    Oracle,
    RandomPolicy,
)
from tvgp_bandit.algorithms.policies import (
    block_size,
    run_gp_ucb,
    run_policy,
    ucb_select,
)
from tvgp_bandit.environment.simulator import sample_initial
from tvgp_bandit.kernel.kernels import EmpiricalKernel, Matern, matern_growth_exponent
from tvgp_bandit.utils.errors import ConfigError

HORIZON = 30


@pytest.fixture
def env_factory(small_grid, se_kernel):
    def build(eps=0.05, noise_var=0.01, seed=0):
        return sample_initial(
            small_grid, se_kernel, seed=seed, eps=eps, noise_var=noise_var
        )

    return build


def test_ucb_select_breaks_ties_low():
    assert ucb_select(np.array([1.0, 2.0, 2.0]), np.zeros(3), 1.0) == 1
    assert ucb_select(np.zeros(3), np.array([0.1, 0.5, 0.2]), 4.0) == 1


def test_ucb_select_rejects():
    with pytest.raises(ConfigError):
        ucb_select(np.zeros(0), np.zeros(0), 1.0)
    with pytest.raises(ConfigError):
        ucb_select(np.zeros(2), np.zeros(3), 1.0)
    with pytest.raises(ConfigError):
        ucb_select(np.zeros(2), np.zeros(2), -1.0)


def test_trace_bookkeeping(env_factory):
    trace = run_policy(env_factory(), AlgorithmConfig(GPUCB()), HORIZON)
    assert trace.horizon == HORIZON
    assert np.all(trace.regrets >= 0.0)
    assert trace.total == pytest.approx(trace.regrets.sum())
    assert trace.average[-1] == pytest.approx(trace.total / HORIZON)
    assert trace.max_posterior_size == HORIZON - 1


def test_runs_are_reproducible(env_factory):
    config = AlgorithmConfig(TVGPUCB())
    first = run_policy(env_factory(seed=4), config, HORIZON)
    second = run_policy(env_factory(seed=4), config, HORIZON)
    assert first.same_choices(second)
    assert np.array_equal(first.regrets, second.regrets)


def test_tv_with_zero_eps_equals_gp_ucb(env_factory):
    gp = run_policy(env_factory(), AlgorithmConfig(GPUCB()), HORIZON)
    tv = run_policy(env_factory(), AlgorithmConfig(TVGPUCB(0.0)), HORIZON)
    assert gp.same_choices(tv)
    assert np.array_equal(gp.regrets, tv.regrets)


def test_long_block_equals_gp_ucb(env_factory):
    gp = run_policy(env_factory(), AlgorithmConfig(GPUCB()), HORIZON)
    reset = run_policy(env_factory(), AlgorithmConfig(RGPUCB(HORIZON)), HORIZON)
    assert gp.same_choices(reset)


def test_reset_bounds_posterior_size(env_factory):
    trace = run_policy(env_factory(), AlgorithmConfig(RGPUCB(7)), HORIZON)
    assert trace.max_posterior_size == 6


def test_block_of_one_always_plays_prior_argmax(env_factory):
    # every step starts from the prior: equal means and stds, so arm 0 wins
    trace = run_policy(env_factory(), AlgorithmConfig(RGPUCB(1)), 10)
    assert trace.arms.tolist() == [0] * 10


def test_static_noiseless_observations_are_exact(env_factory):
    env = env_factory(eps=0.0, noise_var=0.0)
    config = AlgorithmConfig(GPUCB(), noise_var=1e-6)
    trace = run_gp_ucb(env, config, 60)
    assert np.array_equal(trace.observations, env.values[trace.arms])


def test_noiseless_env_needs_assumed_noise(env_factory):
    with pytest.raises(ConfigError):
        run_policy(env_factory(noise_var=0.0), AlgorithmConfig(GPUCB()), 5)


def test_oracle_has_zero_regret(env_factory):
    trace = run_policy(env_factory(eps=0.3), AlgorithmConfig(Oracle()), HORIZON)
    assert trace.total == 0.0


def test_random_uses_its_own_stream(env_factory):
    config = AlgorithmConfig(RandomPolicy())
    first = run_policy(env_factory(), config, HORIZON, rng=np.random.default_rng(1))
    second = run_policy(env_factory(), config, HORIZON, rng=np.random.default_rng(1))
    assert first.same_choices(second)
    with pytest.raises(ConfigError):
        run_policy(env_factory(), config, HORIZON)


def test_first_arm_is_forced(env_factory):
    trace = run_policy(env_factory(), AlgorithmConfig(GPUCB()), 5, first_arm=7)
    assert trace.arms[0] == 7
    with pytest.raises(ConfigError):
        run_policy(env_factory(), AlgorithmConfig(GPUCB()), 5, first_arm=25)


def test_shared_path_digest(env_factory):
    gp = run_policy(env_factory(), AlgorithmConfig(GPUCB()), 10, track_path=True)
    oracle = run_policy(env_factory(), AlgorithmConfig(Oracle()), 10, track_path=True)
    assert gp.path_digest is not None
    assert gp.path_digest == oracle.path_digest


@pytest.mark.slow
def test_random_arms_are_uniform(env_factory):
    config = AlgorithmConfig(RandomPolicy())
    trace = run_policy(env_factory(), config, 100_000, rng=np.random.default_rng(3))
    counts = np.bincount(trace.arms, minlength=25)
    assert stats.chisquare(counts).pvalue > 0.01


def test_random_regret_exceeds_tv_gp_ucb(env_factory):
    random_total = tv_total = 0.0
    for seed in range(8):
        rng = np.random.default_rng(seed)
        random_run = run_policy(
            env_factory(seed=seed), AlgorithmConfig(RandomPolicy()), 60, rng=rng
        )
        tv_run = run_policy(env_factory(seed=seed), AlgorithmConfig(TVGPUCB()), 60)
        random_total += random_run.total
        tv_total += tv_run.total
    assert random_total >= tv_total


def test_bad_horizon(env_factory):
    with pytest.raises(ConfigError):
        run_policy(env_factory(), AlgorithmConfig(GPUCB()), 0)


def test_block_size_rule(se_kernel):
    assert block_size(se_kernel, 1e-4, 1000) == 120
    assert block_size(se_kernel, 1e-4, 50) == 50
    assert block_size(se_kernel, 0.0, 77) == 77
    assert block_size(se_kernel, 0.01, 1000) == math.ceil(12 * 0.01 ** -0.25)


def test_block_size_matern():
    kernel = Matern(0.2, nu=2.5)
    c = matern_growth_exponent(2.5, 2)
    expected = math.ceil(24 * 0.01 ** (-1 / (4 - c)))
    assert block_size(kernel, 0.01, 1000) == expected


def test_block_size_needs_parametric_kernel():
    with pytest.raises(ConfigError):
        block_size(EmpiricalKernel(np.eye(2)), 0.1, 10)
