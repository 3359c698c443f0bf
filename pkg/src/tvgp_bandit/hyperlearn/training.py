from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from tvgp_bandit.environment.grid import DomainGrid
from tvgp_bandit.environment.simulator import GridFactor, simulate_panel
from tvgp_bandit.kernel.kernels import KernelSpec
from tvgp_bandit.utils.errors import ConfigError, IdentifiabilityError
from tvgp_bandit.utils.utils import make_rng


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """
    Observations ȳ with time stamps and locations.

    Stamps may repeat (many sensors read at one time). `segments` labels
    statistically independent stretches such as separate days; observations in
    different segments are uncorrelated.
    """

    values: np.ndarray
    times: np.ndarray
    locations: np.ndarray
    segments: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        times = np.asarray(self.times, dtype=float).reshape(-1)
        locations = np.asarray(self.locations)
        if locations.ndim == 1:
            locations = locations.reshape(-1, 1)
        segments = (
            np.zeros(values.size, dtype=int)
            if self.segments is None
            else np.asarray(self.segments).reshape(-1)
        )
        if not (values.size == times.size == locations.shape[0] == segments.size):
            raise ConfigError(
                "training values, times, locations and segments must have equal lengths"
            )
        if np.any(times < 0):
            raise ConfigError("time stamps must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "segments", segments)

    def __len__(self) -> int:
        return self.values.size

    def split(self) -> list["TrainingSet"]:
        """One training set per segment, in label order."""
        return [
            TrainingSet(
                values=self.values[mask],
                times=self.times[mask],
                locations=self.locations[mask],
            )
            for mask in (self.segments == label for label in np.unique(self.segments))
        ]

    def check_identifiable(self) -> None:
        if len(self) < 2:
            raise IdentifiabilityError(f"need at least 2 observations, got {len(self)}")
        if not any(np.unique(part.times).size >= 2 for part in self.split()):
            raise IdentifiabilityError(
                "need at least 2 distinct time stamps within one segment to identify ε"
            )

    @classmethod
    def from_panels(
        cls, panels: Sequence[np.ndarray], locations: np.ndarray
    ) -> "TrainingSet":
        """
        Flatten (steps × arms) reading panels, one per independent segment.
        Row r of a panel is stamped r + 1; NaN readings are skipped.
        """
        locations = np.asarray(locations)
        if locations.ndim == 1:
            locations = locations.reshape(-1, 1)
        values, times, where, segments = [], [], [], []
        for label, panel in enumerate(panels):
            panel = np.asarray(panel, dtype=float)
            if panel.ndim != 2 or panel.shape[1] != locations.shape[0]:
                raise ConfigError(
                    f"panel {label} has shape {panel.shape}, "
                    f"expected (steps, {locations.shape[0]})"
                )
            rows, cols = np.nonzero(~np.isnan(panel))
            values.append(panel[rows, cols])
            times.append(rows + 1.0)
            where.append(locations[cols])
            segments.append(np.full(rows.size, label))
        if not values:
            raise ConfigError("no training panels given")
        return cls(
            values=np.concatenate(values),
            times=np.concatenate(times),
            locations=np.concatenate(where),
            segments=np.concatenate(segments),
        )

    @classmethod
    def simulated(
        cls,
        grid: DomainGrid,
        kernel: KernelSpec,
        eps: float,
        noise_var: float,
        days: int,
        steps: int,
        seed: int,
    ) -> "TrainingSet":
        """Noisy readings of every grid arm at every step of `days` independent paths."""
        if days < 1:
            raise ConfigError(f"days must be >= 1, got {days}")
        cache = GridFactor.build(grid, kernel)
        panels = []
        for day in range(days):
            panel = simulate_panel(grid, kernel, eps, steps, seed, trial=day, cache=cache)
            noise = make_rng(seed, day, "noise").standard_normal(panel.shape)
            panels.append(panel + np.sqrt(noise_var) * noise)
        return cls.from_panels(panels, grid.arm_locations())
