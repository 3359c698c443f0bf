import numpy as np
import pytest

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.kernel.kernels import SquaredExponential
from tvgp_bandit.theory.genie import genie_baseline, genie_trial, loglog_slope
from tvgp_bandit.utils.errors import ConfigError


def test_static_world_costs_nothing(small_grid, se_kernel):
    regrets = genie_trial(small_grid, se_kernel, 0.0, 15, seed=0)
    assert regrets.shape == (14,)
    assert np.all(regrets == 0.0)


def test_regret_is_non_negative(small_grid, se_kernel):
    assert np.all(genie_trial(small_grid, se_kernel, 0.2, 15, seed=1) >= 0.0)


def test_needs_two_steps(small_grid, se_kernel):
    with pytest.raises(ConfigError):
        genie_trial(small_grid, se_kernel, 0.1, 1, seed=0)


def test_baseline_table(small_grid, se_kernel):
    table = genie_baseline(small_grid, se_kernel, [0.0, 0.01, 0.2], 20, trials=30)
    assert table.columns.tolist() == ["eps", "mean_regret", "std_error", "trials"]
    assert table.mean_regret.iloc[0] == 0.0
    assert table.mean_regret.is_monotonic_increasing
    assert (table.trials == 30).all()


def test_baseline_is_reproducible(small_grid, se_kernel):
    first = genie_baseline(small_grid, se_kernel, [0.05], 10, trials=4, seed=2)
    second = genie_baseline(small_grid, se_kernel, [0.05], 10, trials=4, seed=2)
    assert first.equals(second)


def test_loglog_slope_of_power_law():
    eps = np.array([0.001, 0.01, 0.1])
    assert loglog_slope(eps, 3.0 * eps**0.75) == pytest.approx(0.75)


@pytest.mark.parametrize(
    "eps, regrets", [([0.1], [1.0]), ([0.0, 0.1], [1.0, 2.0]), ([0.1, 0.2], [0.0, 1.0])]
)
def test_loglog_slope_rejects(eps, regrets):
    with pytest.raises(ConfigError):
        loglog_slope(eps, regrets)


@pytest.mark.slow
def test_per_step_regret_grows_linearly_in_eps():
    grid, kernel = DomainGrid.regular(30), SquaredExponential(0.2)
    sweep = [0.005, 0.01, 0.02, 0.04]
    table = genie_baseline(grid, kernel, sweep, 50, trials=200, seed=3)
    assert table.mean_regret.diff().iloc[1:].gt(0.0).all()
    assert 0.7 <= loglog_slope(table.eps, table.mean_regret) <= 1.3
