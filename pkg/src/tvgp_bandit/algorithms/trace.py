from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class RegretTrace:
    """One policy run: per step chosen arm, observed y and instantaneous regret."""

    label: str
    arms: np.ndarray
    observations: np.ndarray
    regrets: np.ndarray
    seed: int
    trial: int = 0
    # largest number of observations the posterior held when an arm was chosen
    max_posterior_size: int = 0
    path_digest: Optional[str] = None

    @property
    def horizon(self) -> int:
        return int(self.regrets.shape[0])

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.regrets)

    @property
    def total(self) -> float:
        """R_T, summed in step order."""
        if self.horizon == 0:
            return 0.0
        return float(self.cumulative[-1])

    @property
    def average(self) -> np.ndarray:
        """R_t / t for t = 1..T."""
        return self.cumulative / np.arange(1, self.horizon + 1)

    def same_choices(self, other: "RegretTrace") -> bool:
        return bool(np.array_equal(self.arms, other.arms))
