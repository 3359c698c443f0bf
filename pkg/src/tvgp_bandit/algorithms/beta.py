"""
Exploration weights β_t for the UCB score μ(x) + √β_t·σ(x).

`PracticalBeta` is the c₁·log(c₂·t) scaling used in experiments. The theoretical
schedules are the high-probability choices for TV-GP-UCB and R-GP-UCB on
[0, r]^d, with smoothness constants a and b supplied by the caller.
"""

import math
from dataclasses import dataclass
from typing import Union

from tvgp_bandit.utils.errors import ConfigError


@dataclass(frozen=True)
class PracticalBeta:
    c1: float = 0.8
    c2: float = 4.0

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ConfigError(
                f"beta constants must be positive, got c1={self.c1}, c2={self.c2}"
            )

    def __call__(self, t: int) -> float:
        # negative for c2·t < 1, e.g. the c2 = 0.4 real-data setting at t = 1
        return max(0.0, self.c1 * math.log(self.c2 * t))


@dataclass(frozen=True)
class _TheoreticalBeta:
    delta: float = 0.1
    dim: int = 2
    box: float = 1.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.dim < 1 or not (self.box > 0 and self.a > 0 and self.b > 0):
            raise ConfigError("dim, box, a and b must all be positive")
        if self._confidence(1) * self.dim * self.a <= 1.0:
            raise ConfigError("d·a·(confidence term) must exceed 1 for a finite beta")

    def _confidence(self, t: int) -> float:
        raise NotImplementedError

    def __call__(self, t: int) -> float:
        confidence = self._confidence(t)
        discretization = (
            self.box
            * self.dim
            * self.b
            * t**2
            * math.sqrt(math.log(self.dim * self.a * confidence))
        )
        return 2.0 * math.log(confidence) + 2.0 * self.dim * math.log(discretization)


@dataclass(frozen=True)
class TheoreticalTVBeta(_TheoreticalBeta):
    """β_t = 2 log(π²t²/2δ) + 2d log(r·d·b·t²·√log(d·a·π²t²/2δ))."""

    def _confidence(self, t: int) -> float:
        return math.pi**2 * t**2 / (2.0 * self.delta)


@dataclass(frozen=True)
class TheoreticalRBeta(_TheoreticalBeta):
    """β_t = 2 log(2π²t²/3δ) + 2d log(r·d·b·t²·√log(2d·a·π²t²/3δ))."""

    def _confidence(self, t: int) -> float:
        return 2.0 * math.pi**2 * t**2 / (3.0 * self.delta)


BetaSchedule = Union[PracticalBeta, TheoreticalTVBeta, TheoreticalRBeta]


def beta(schedule: BetaSchedule, t: int) -> float:
    if t < 1:
        raise ConfigError(f"beta is defined for t >= 1, got {t}")
    return schedule(t)
