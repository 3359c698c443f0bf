import math

import numpy as np
import pytest

from tvgp_bandit.kernel.kernels import EmpiricalKernel, Matern
from tvgp_bandit.theory.bounds import (
    BoundInputs,
    corollary_rates,
    psi,
    regret_bound_r,
    regret_bound_tv,
    regret_bound_tv_weakened,
)
from tvgp_bandit.utils.errors import ConfigError


def test_c1():
    assert BoundInputs(horizon=1, beta_t=1.0, noise_var=1.0).c1 == pytest.approx(
        8.0 / math.log(2.0)
    )


def test_tv_bound_hand_value():
    inputs = BoundInputs(horizon=100, beta_t=5.0, noise_var=0.01, gamma_tv=10.0)
    # C₁ = 8 / log 101 ≈ 1.73343; √(1.73343·100·5·10) + 2 ≈ 95.10
    assert regret_bound_tv(inputs) == pytest.approx(95.10, abs=0.01)


def test_tv_bound_needs_gamma():
    with pytest.raises(ConfigError):
        regret_bound_tv(BoundInputs(horizon=10, beta_t=1.0, noise_var=0.1))


def test_weakened_bound_without_drift_reduces_to_block_form():
    inputs = BoundInputs(
        horizon=100, beta_t=5.0, noise_var=0.01, eps=0.0, block=10, gamma_block=4.0
    )
    expected = math.sqrt(inputs.c1 * 100 * 5.0 * 11.0 * 4.0) + 2.0
    assert regret_bound_tv_weakened(inputs) == pytest.approx(expected)
    # R-GP-UCB pays nothing extra for ignoring a drift that is not there
    assert psi(inputs) == 0.0
    assert regret_bound_r(inputs) == pytest.approx(expected)


def test_psi_hand_value():
    inputs = BoundInputs(
        horizon=10, beta_t=2.0, noise_var=1.0, eps=0.001, block=2, delta=0.1
    )
    drift = 8 * 0.001
    spread = math.sqrt(2.0 * 4.0 * drift)
    shift = 2.0 * drift * 3.0 * math.sqrt(math.log(4 * math.pi**2 * 100 / 0.3))
    assert psi(inputs) == pytest.approx(spread + shift)


def test_r_bound_grows_with_eps():
    low, high = (
        regret_bound_r(
            BoundInputs(
                horizon=100, beta_t=5.0, noise_var=0.1, eps=eps, block=10, gamma_block=4.0
            )
        )
        for eps in (0.001, 0.01)
    )
    assert high > low


@pytest.mark.parametrize(
    "kwargs",
    [
        {"horizon": 0},
        {"beta_t": -1.0},
        {"noise_var": 0.0},
        {"eps": 1.5},
        {"delta": 1.0},
        {"block": 11},
        {"a0": 0.0},
    ],
)
def test_bad_inputs(kwargs):
    values = {"horizon": 10, "beta_t": 1.0, "noise_var": 0.1, **kwargs}
    with pytest.raises(ConfigError):
        BoundInputs(**values)


def test_se_rates():
    rates = corollary_rates("se", 100, 0.01)
    assert rates.base == 10.0
    assert rates.tv_rate == pytest.approx(100 * 0.01 ** (1 / 6))
    assert rates.r_rate == pytest.approx(100 * 0.01 ** (1 / 8))
    # TV-GP-UCB has the better drift exponent
    assert rates.tv_rate < rates.r_rate


def test_rates_floor_at_base():
    rates = corollary_rates("se", 100, 1e-12)
    assert rates.tv_rate == rates.r_rate == 10.0


def test_matern_rates():
    c = 6 / 11
    rates = corollary_rates("matern", 100, 0.01, nu=2.5, dim=2)
    assert rates.base == pytest.approx(100 ** ((1 + c) / 2))
    assert rates.tv_exponent == pytest.approx((1 - c) / (2 * (3 - c)))
    assert rates.r_exponent == pytest.approx((1 - c) / (2 * (4 - c)))


def test_unknown_family():
    with pytest.raises(ConfigError):
        corollary_rates("empirical", 10, 0.1)


def test_rates_from_a_kernel(se_kernel):
    assert corollary_rates(se_kernel, 100, 0.01) == corollary_rates("se", 100, 0.01)
    rough = corollary_rates(Matern(0.2, nu=1.5), 100, 0.01, dim=1)
    assert rough == corollary_rates("matern", 100, 0.01, nu=1.5, dim=1)
    with pytest.raises(ConfigError):
        corollary_rates(EmpiricalKernel(np.eye(2)), 100, 0.01)
