import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from tvgp_bandit.utils.errors import ConfigError

# Stream codes mixed into every derived seed, so that e.g. the algorithm's
# random choices never consume draws from the environment's stream.
STREAM_CODES = {"env": 0, "noise": 1, "algorithm": 2, "check": 3}


def read_from_yaml(file_path: Union[str, Path]) -> dict:
    with open(file_path, "r") as f:
        return yaml.safe_load(f) or {}


def read_flat_config(file_path: Union[str, Path]) -> dict[str, str]:
    """
    Read a flat `key = value` config file.

    Blank lines and anything after a `#` are ignored. Values are returned as raw
    strings; list values stay comma separated and are split by the caller.

    :param file_path: Path to the config file
    :return: Mapping of key to raw string value
    """
    values: dict[str, str] = {}
    with open(file_path, "r", encoding="utf-8") as f:
        for line_number, raw_line in enumerate(f, start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(
                    f"{file_path}:{line_number}: expected 'key = value', got {line!r}"
                )
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"{file_path}:{line_number}: empty key")
            values[key] = value.strip()
    return values


def derive_seed(
    master_seed: int, trial_index: int, stream: str
) -> np.random.SeedSequence:
    """Seed for one (trial, stream) pair, independent of execution order."""
    if stream not in STREAM_CODES:
        raise ConfigError(f"Unknown seed stream '{stream}'")
    entropy = [int(master_seed), int(trial_index), STREAM_CODES[stream]]
    return np.random.SeedSequence(entropy)


def make_rng(master_seed: int, trial_index: int, stream: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, trial_index, stream))


@dataclass
class Timer:
    start: Optional[float] = field(default=None, init=False)
    end: Optional[float] = None

    def __post_init__(self):
        self.start = time.perf_counter()

    def stop_timer(self):
        self.end = time.perf_counter()

    @property
    def elapsed(self) -> Optional[float]:
        if self.end is None:
            self.stop_timer()
        if self.start is not None and self.end is not None:
            return self.end - self.start
        return None
