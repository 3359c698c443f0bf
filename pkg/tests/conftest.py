# tests/conftest.py
import os
import sys
from pathlib import Path

import numpy as np
import pytest
from loguru import logger

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.kernel.kernels import Matern, SquaredExponential
from tvgp_bandit.tracking.tracker import step_tracker

# Add `src/` and `tests/` to sys.path if not already present
BASE_DIR = Path(__file__).resolve().parent.parent
for subdir in ["src", "tests"]:
    path = str(BASE_DIR / subdir)
    if path not in sys.path:
        sys.path.insert(0, path)


def pytest_runtest_setup(item):
    if "local_only" in item.keywords and os.getenv("CI") == "true":
        pytest.skip("Skipping local-only test in CI environment")


# ---------- fixtures ------------------------------------------------


@pytest.fixture(autouse=True)
def fresh_tracker():
    """Every test starts from an empty step tree."""
    step_tracker.reset()
    yield
    step_tracker.reset()


@pytest.fixture
def log_messages():
    """Collect loguru messages (pytest's caplog only sees stdlib logging)."""
    messages: list[str] = []
    handler = logger.add(lambda message: messages.append(str(message)), level="DEBUG")
    yield messages
    logger.remove(handler)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def se_kernel():
    return SquaredExponential(lengthscale=0.2)


@pytest.fixture
def matern_kernel():
    return Matern(lengthscale=0.2, nu=2.5)


@pytest.fixture
def small_grid():
    """5 × 5 grid over [0, 1]²."""
    return DomainGrid.regular(5, dim=2, box=1.0)


@pytest.fixture
def line_grid():
    return DomainGrid.regular(8, dim=1, box=1.0)
