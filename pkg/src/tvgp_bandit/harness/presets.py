from dataclasses import dataclass
from typing import Optional

from tvgp_bandit.utils.errors import ConfigError


@dataclass(frozen=True)
class RealDataPreset:
    """Noise level (raw units) and exploration constants for one sensor dataset."""

    noise_var: float
    beta_c1: float
    beta_c2: float
    # rows per independent day; None treats the training rows as one stretch
    rows_per_day: Optional[int] = None
    horizon: Optional[int] = None
    # CSV column ids to keep; empty keeps every sensor
    sensor_ids: tuple[str, ...] = ()


# Traffic speed sensors kept out of the 357 on the highway.
TRAFFIC_SENSOR_IDS = (
    0, 54, 69, 77, 169, 131, 262, 216, 34, 320,
    308, 177, 130, 221, 290, 348, 25, 157, 252, 83,
    163, 149, 294, 21, 246, 45, 98, 74, 274, 237,
    322, 29, 120, 44, 49, 241, 286, 99, 247, 297,
    96, 234, 236, 205, 329, 214, 28, 175, 65, 220,
)  # fmt: skip

REAL_DATA_PRESETS = {
    # 46 sensors, 10-minute readings, 3 training days and 2 test days
    "temperature": RealDataPreset(
        noise_var=0.5, beta_c1=0.8, beta_c2=0.4, rows_per_day=144
    ),
    # 84 readings per day, each day independent, T = 84
    "traffic": RealDataPreset(
        noise_var=5.0,
        beta_c1=0.2,
        beta_c2=0.4,
        rows_per_day=84,
        horizon=84,
        sensor_ids=tuple(str(sensor) for sensor in TRAFFIC_SENSOR_IDS),
    ),
}


def get_preset(name: str) -> RealDataPreset:
    try:
        return REAL_DATA_PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset '{name}', expected one of {sorted(REAL_DATA_PRESETS)}"
        ) from None
