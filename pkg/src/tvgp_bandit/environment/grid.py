from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from tvgp_bandit.utils.errors import ConfigError


@dataclass(frozen=True, eq=False)
class DomainGrid:
    """
    Finite set of points in [0, box]^dim.

    Regular grids carry their per-axis `resolution`; grids built from explicit
    points (or an index domain for an empirical kernel) have `resolution = None`.
    """

    points: np.ndarray
    box: float = 1.0
    resolution: Optional[tuple[int, ...]] = None
    indexed: bool = field(default=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ConfigError(f"grid needs a non-empty (n, d) array, got {points.shape}")
        if not self.indexed and (np.any(points < 0.0) or np.any(points > self.box)):
            raise ConfigError(f"grid points must lie in [0, {self.box}]^d")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ConfigError("grid points must be distinct")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def arm_locations(self) -> np.ndarray:
        """What the kernel is evaluated on: points, or integer indices if indexed."""
        if self.indexed:
            return self.points[:, 0].astype(int)
        return self.points

    @classmethod
    def regular(cls, resolution: int, dim: int = 2, box: float = 1.0) -> "DomainGrid":
        """`resolution` equally spaced points per axis including both ends."""
        if resolution < 1 or dim < 1:
            raise ConfigError(f"bad grid resolution={resolution}, dim={dim}")
        if not box > 0:
            raise ConfigError(f"grid box must be positive, got {box}")
        axis = np.linspace(0.0, box, resolution) if resolution > 1 else np.array([0.0])
        points = np.array(list(product(axis, repeat=dim)))
        return cls(points=points, box=box, resolution=(resolution,) * dim)

    @classmethod
    def from_points(cls, points, box: float = 1.0) -> "DomainGrid":
        return cls(points=np.asarray(points, dtype=float), box=box)

    @classmethod
    def indexed_domain(cls, size: int) -> "DomainGrid":
        """Arms 0..size-1 for an empirical-covariance kernel."""
        if size < 1:
            raise ConfigError(f"indexed domain needs size >= 1, got {size}")
        return cls(points=np.arange(size, dtype=float), box=float(size), indexed=True)
