from dataclasses import dataclass, field
from typing import Optional, Union

from tvgp_bandit.algorithms.beta import BetaSchedule, PracticalBeta
from tvgp_bandit.kernel.decay import validate_eps
from tvgp_bandit.utils.errors import ConfigError


@dataclass(frozen=True)
class GPUCB:
    pass


@dataclass(frozen=True)
class RGPUCB:
    block_size: int

    def __post_init__(self):
        if self.block_size < 1:
            raise ConfigError(f"block size must be >= 1, got {self.block_size}")


@dataclass(frozen=True)
class TVGPUCB:
    # None means "use the environment's true ε"
    assumed_eps: Optional[float] = None

    def __post_init__(self):
        if self.assumed_eps is not None:
            validate_eps(self.assumed_eps)


@dataclass(frozen=True)
class RandomPolicy:
    pass


@dataclass(frozen=True)
class Oracle:
    """Picks the current maximizer; zero regret by construction."""


Variant = Union[GPUCB, RGPUCB, TVGPUCB, RandomPolicy, Oracle]


@dataclass(frozen=True)
class AlgorithmConfig:
    variant: Variant
    beta: BetaSchedule = field(default_factory=PracticalBeta)
    # None means "use the environment's true σ²"
    noise_var: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.noise_var is not None and not self.noise_var > 0:
            raise ConfigError(
                f"assumed noise variance must be positive, got {self.noise_var}"
            )
        if not self.label:
            object.__setattr__(self, "label", default_label(self.variant))


def default_label(variant: Variant) -> str:
    if isinstance(variant, GPUCB):
        return "gp-ucb"
    if isinstance(variant, RGPUCB):
        return f"r-gp-ucb:{variant.block_size}"
    if isinstance(variant, TVGPUCB):
        if variant.assumed_eps is None:
            return "tv-gp-ucb"
        return f"tv-gp-ucb:{variant.assumed_eps:g}"
    if isinstance(variant, RandomPolicy):
        return "random"
    return "oracle"


def parse_algorithm(text: str) -> Variant:
    """
    Parse an algorithm entry from a config list.

    Accepted forms: `gp-ucb`, `tv-gp-ucb`, `tv-gp-ucb:<ε̂>`, `r-gp-ucb`, `r-gp-ucb:<N>`,
    `random`, `oracle`. A bare `r-gp-ucb` takes its block size from the block-size
    rule once kernel, ε and T are known (see `is_auto_block`).
    """
    name, _, argument = text.strip().lower().partition(":")
    try:
        if name == "gp-ucb" and not argument:
            return GPUCB()
        if name == "tv-gp-ucb":
            return TVGPUCB(float(argument) if argument else None)
        if name == "r-gp-ucb":
            if not argument:
                return _AutoBlock()
            return RGPUCB(int(argument))
        if name == "random" and not argument:
            return RandomPolicy()
        if name == "oracle" and not argument:
            return Oracle()
    except ValueError as e:
        raise ConfigError(f"Bad algorithm entry '{text}': {e}") from e
    raise ConfigError(f"Unknown algorithm entry '{text}'")


@dataclass(frozen=True)
class _AutoBlock(RGPUCB):
    """R-GP-UCB whose block size is filled in from (kernel, ε, T) later."""

    block_size: int = 0

    def __post_init__(self):
        pass


def is_auto_block(variant: Variant) -> bool:
    return isinstance(variant, _AutoBlock)
