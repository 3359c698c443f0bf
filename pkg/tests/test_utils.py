import numpy as np
import pytest

from tvgp_bandit.utils.errors import ConfigError, TVGPError
from tvgp_bandit.utils.utils import (
    Timer,
    derive_seed,
    make_rng,
    read_flat_config,
    read_from_yaml,
)
from utils import write_csv


def test_streams_are_independent():
    env = make_rng(7, 3, "env").standard_normal(5)
    noise = make_rng(7, 3, "noise").standard_normal(5)
    assert not np.array_equal(env, noise)
    assert np.array_equal(env, make_rng(7, 3, "env").standard_normal(5))


def test_seed_entropy():
    assert derive_seed(7, 3, "algorithm").entropy == [7, 3, 2]


def test_unknown_stream():
    with pytest.raises(ConfigError):
        derive_seed(0, 0, "weather")


def test_flat_config(tmp_path):
    path = write_csv(tmp_path / "x.cfg", ["", "a = 1", "b = x, y  # list", "c ="])
    assert read_flat_config(path) == {"a": "1", "b": "x, y", "c": ""}


def test_flat_config_empty_key(tmp_path):
    with pytest.raises(ConfigError):
        read_flat_config(write_csv(tmp_path / "x.cfg", ["= 3"]))


def test_empty_yaml(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert read_from_yaml(path) == {}


def test_timer():
    timer = Timer()
    timer.stop_timer()
    assert timer.elapsed is not None and timer.elapsed >= 0.0


def test_errors_share_a_base():
    assert issubclass(ConfigError, TVGPError) and issubclass(ConfigError, ValueError)
