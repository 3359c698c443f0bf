from pathlib import Path
from typing import Sequence, Union

import numpy as np

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.environment.simulator import simulate_panel
from tvgp_bandit.harness.sensors import SensorDataset
from tvgp_bandit.kernel.kernels import SquaredExponential


def random_spd(size: int, rng: np.random.Generator, ridge: float = 0.1) -> np.ndarray:
    """Well-conditioned symmetric positive definite matrix."""
    factor = rng.standard_normal((size, size))
    return factor @ factor.T / size + ridge * np.eye(size)


def write_csv(path: Union[str, Path], lines: Sequence[str]) -> Path:
    """Write raw CSV lines exactly as given (no quoting, "\\n" endings)."""
    path = Path(path)
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return path


def finite_difference(fn, x: float, step: float = 1e-6) -> float:
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def sensor_panel(
    days: int, arms: int, eps: float, rows_per_day: int, seed: int = 0
) -> SensorDataset:
    """Sensor readings around 20 degrees that drift like the time-varying model."""
    grid = DomainGrid.regular(arms, dim=1)
    kernel = SquaredExponential(0.3)
    noise = np.random.default_rng(seed).standard_normal((days * rows_per_day, arms))
    readings = np.vstack(
        [
            simulate_panel(grid, kernel, eps, rows_per_day, seed=seed, trial=day)
            for day in range(days)
        ]
    )
    readings = 20.0 + 3.0 * readings + 0.1 * noise
    return SensorDataset(
        readings,
        [f"s{i}" for i in range(arms)],
        [str(i) for i in range(1, readings.shape[0] + 1)],
    )
