import numpy as np
import pytest

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.environment.simulator import (
    GridFactor,
    evolve,
    instantaneous_regret,
    observe,
    sample_initial,
    simulate_panel,
)
from tvgp_bandit.kernel.kernels import EmpiricalKernel, SquaredExponential
from tvgp_bandit.utils.errors import ConfigError

PATHS = 10_000
PATH_STEPS = 6
PATH_EPS = 0.05


@pytest.fixture(scope="module")
def paths():
    """(path, step, arm) values of independent paths on an 8-point line."""
    grid, kernel = DomainGrid.regular(8, dim=1), SquaredExponential(0.2)
    cache = GridFactor.build(grid, kernel)
    return np.stack(
        [
            simulate_panel(
                grid, kernel, PATH_EPS, PATH_STEPS, seed=21, trial=trial, cache=cache
            )
            for trial in range(PATHS)
        ]
    )


def test_regular_grid_layout():
    grid = DomainGrid.regular(3, dim=2, box=2.0)
    assert grid.size == 9 and grid.dim == 2
    assert grid.resolution == (3, 3)
    assert grid.points[0].tolist() == [0.0, 0.0]
    assert grid.points[-1].tolist() == [2.0, 2.0]


@pytest.mark.parametrize(
    "points", [np.zeros((0, 2)), [[0.0, 0.0], [0.0, 0.0]], [[0.5, 1.5]]]
)
def test_grid_rejects(points):
    with pytest.raises(ConfigError):
        DomainGrid.from_points(points)


def test_indexed_domain():
    grid = DomainGrid.indexed_domain(4)
    assert grid.arm_locations().tolist() == [0, 1, 2, 3]


def test_same_seed_same_path(small_grid, se_kernel):
    first = simulate_panel(small_grid, se_kernel, 0.05, 10, seed=3, trial=2)
    second = simulate_panel(small_grid, se_kernel, 0.05, 10, seed=3, trial=2)
    other = simulate_panel(small_grid, se_kernel, 0.05, 10, seed=3, trial=1)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


def test_eps_zero_is_static(small_grid, se_kernel):
    panel = simulate_panel(small_grid, se_kernel, 0.0, 5, seed=0)
    assert np.array_equal(panel, np.tile(panel[0], (5, 1)))


def test_eps_one_redraws(small_grid, se_kernel):
    state = sample_initial(small_grid, se_kernel, seed=0, eps=1.0)
    later = state.evolve()
    assert later.time == 2
    assert not np.allclose(later.values, state.values)


def test_noise_stream_is_separate(small_grid, se_kernel):
    # observing does not change the environment path
    quiet = sample_initial(small_grid, se_kernel, seed=5, eps=0.1, noise_var=0.1)
    busy = sample_initial(small_grid, se_kernel, seed=5, eps=0.1, noise_var=0.1)
    for _ in range(4):
        busy.observe(0)
    assert np.array_equal(evolve(quiet).values, evolve(busy).values)


def test_noiseless_observation_and_regret(small_grid, se_kernel):
    state = sample_initial(small_grid, se_kernel, seed=1, noise_var=0.0)
    best = state.best_arm()
    assert observe(state, 3) == state.values[3]
    assert instantaneous_regret(state, best) == 0.0
    assert instantaneous_regret(state, 0) == pytest.approx(
        state.values.max() - state.values[0]
    )
    with pytest.raises(IndexError):
        state.observe(small_grid.size)


def test_stationary_moments(paths):
    # f_t(x) stays N(0, k(x, x) = 1) along the chain
    for step in (0, PATH_STEPS - 1):
        values = paths[:, step, :]
        assert np.all(np.abs(values.mean(axis=0)) < 4.0 / np.sqrt(PATHS))
        assert np.all(np.abs(values.var(axis=0) - 1.0) < 0.05)


@pytest.mark.parametrize("lag", [1, 5])
def test_lagged_autocovariance(paths, lag):
    # Cov[f_t(x), f_{t+j}(x)] = (1 - ε)^{j/2} k(x, x)
    arm = 3
    start, later = paths[:, 0, arm], paths[:, lag, arm]
    covariance = np.mean(start * later) - start.mean() * later.mean()
    assert covariance == pytest.approx((1.0 - PATH_EPS) ** (lag / 2), rel=0.05)


def test_evolve_preserves_the_ensemble_covariance(paths):
    gram = GridFactor.build(DomainGrid.regular(8, dim=1), SquaredExponential(0.2)).gram
    for step in (0, PATH_STEPS - 1):
        sample = np.cov(paths[:, step, :], rowvar=False)
        assert np.linalg.norm(sample - gram) <= 0.05 * np.linalg.norm(gram)


def test_observation_noise_averages_out(small_grid, se_kernel):
    state = sample_initial(small_grid, se_kernel, seed=2, noise_var=0.01)
    readings = np.array([state.observe(4) for _ in range(PATHS)])
    # within 4 standard errors σ / √n
    assert abs(readings.mean() - state.values[4]) < 4.0 * 0.1 / 100


def test_empirical_grid_factor():
    kernel = EmpiricalKernel(np.array([[1.0, 1.0], [1.0, 1.0]]))
    cache = GridFactor.build(DomainGrid.indexed_domain(2), kernel)
    assert cache.jitter > 0.0


def test_bad_parameters(small_grid, se_kernel):
    with pytest.raises(ConfigError):
        sample_initial(small_grid, se_kernel, seed=0, eps=1.2)
    with pytest.raises(ConfigError):
        sample_initial(small_grid, se_kernel, seed=0, noise_var=-1.0)
    with pytest.raises(ConfigError):
        simulate_panel(small_grid, se_kernel, 0.1, 0, seed=0)
