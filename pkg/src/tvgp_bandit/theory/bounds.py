"""
Closed-form regret bounds and rate exponents.

These are bookkeeping formulas: they take β_T and the information terms as inputs
and never touch a GP. a₀ and b₀ are the caller's smoothness constants for the
R-GP-UCB bound; there are no published values for SE or Matérn.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

from tvgp_bandit.kernel.kernels import (
    KernelSpec,
    Matern,
    kernel_family,
    matern_growth_exponent,
)
from tvgp_bandit.utils.errors import ConfigError


@dataclass(frozen=True)
class BoundInputs:
    horizon: int
    beta_t: float
    noise_var: float
    eps: float = 0.0
    delta: float = 0.1
    # block length N for R-GP-UCB, analysis block Ñ for TV-GP-UCB
    block: Optional[int] = None
    gamma_block: Optional[float] = None
    gamma_tv: Optional[float] = None
    # tail constants of the kernel derivative bound; placeholders, set per kernel
    a0: float = 1.0
    b0: float = 1.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.beta_t < 0 or not self.noise_var > 0:
            raise ConfigError("beta must be non-negative and noise variance positive")
        if not 0.0 <= self.eps <= 1.0:
            raise ConfigError(f"epsilon must lie in [0, 1], got {self.eps}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.block is not None and not 1 <= self.block <= self.horizon:
            raise ConfigError(f"block must lie in 1..{self.horizon}, got {self.block}")
        if self.a0 <= 0 or self.b0 <= 0:
            raise ConfigError("a0 and b0 must be positive")

    @property
    def c1(self) -> float:
        """C₁ = 8 / log(1 + σ⁻²)."""
        return 8.0 / math.log1p(1.0 / self.noise_var)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"bound needs {', '.join(missing)}")


def regret_bound_tv(inputs: BoundInputs) -> float:
    """√(C₁·T·β_T·γ̃_T) + 2."""
    inputs.require("gamma_tv")
    product = inputs.c1 * inputs.horizon * inputs.beta_t * inputs.gamma_tv
    return math.sqrt(product) + 2.0


def regret_bound_tv_weakened(inputs: BoundInputs) -> float:
    """√(C₁·T·β_T·(T/Ñ + 1)·(γ_Ñ + Ñ³ε)) + 2."""
    inputs.require("block", "gamma_block")
    n = inputs.block
    capacity = (inputs.horizon / n + 1.0) * (inputs.gamma_block + n**3 * inputs.eps)
    return math.sqrt(inputs.c1 * inputs.horizon * inputs.beta_t * capacity) + 2.0


def psi(inputs: BoundInputs) -> float:
    """Per-step penalty of R-GP-UCB for ignoring the drift inside a block."""
    inputs.require("block")
    inv = 1.0 / inputs.noise_var
    drift = inputs.block**3 * inputs.eps
    spread = math.sqrt(inputs.beta_t * (3.0 * inv + inv**2) * drift)
    confidence = math.log(
        2.0 * (1.0 + inputs.a0) * math.pi**2 * inputs.horizon**2 / (3.0 * inputs.delta)
    )
    shift = (inv + inv**2) * drift * (2.0 + inputs.b0) * math.sqrt(confidence)
    return spread + shift


def regret_bound_r(inputs: BoundInputs) -> float:
    """√(C₁·T·β_T·(T/N + 1)·γ_N) + 2 + T·ψ_T(N, ε)."""
    inputs.require("block", "gamma_block")
    t = inputs.horizon
    head = inputs.c1 * t * inputs.beta_t * (t / inputs.block + 1.0) * inputs.gamma_block
    return math.sqrt(head) + 2.0 + t * psi(inputs)


@dataclass(frozen=True)
class CorollaryRates:
    base: float
    tv_exponent: float
    r_exponent: float
    tv_rate: float
    r_rate: float


def corollary_rates(
    family: Union[str, KernelSpec],
    horizon: int,
    eps: float,
    nu: float = 2.5,
    dim: int = 2,
) -> CorollaryRates:
    """
    `family` is "se", "matern" or a kernel; a Matérn kernel supplies its own ν.

    max{base, T·ε^α} for both algorithms, with base √T (SE) or √(T^{1+c})
    (Matérn) and α = 1/6, 1/8 (SE) or (1-c)/(2(3-c)), (1-c)/(2(4-c)) (Matérn).
    Logarithmic factors are ignored. The Matérn rates hold for ν > 2 only.
    """
    if horizon < 1 or not 0.0 <= eps <= 1.0:
        raise ConfigError(f"bad rate inputs horizon={horizon}, eps={eps}")
    if isinstance(family, Matern):
        nu = family.nu
    if not isinstance(family, str):
        family = kernel_family(family)
    if family == "se":
        base = math.sqrt(horizon)
        tv_exponent, r_exponent = 1.0 / 6.0, 1.0 / 8.0
    elif family == "matern":
        c = matern_growth_exponent(nu, dim)
        base = math.sqrt(horizon ** (1.0 + c))
        tv_exponent = (1.0 - c) / (2.0 * (3.0 - c))
        r_exponent = (1.0 - c) / (2.0 * (4.0 - c))
    else:
        raise ConfigError(f"no rates for kernel family '{family}'")
    return CorollaryRates(
        base=base,
        tv_exponent=tv_exponent,
        r_exponent=r_exponent,
        tv_rate=max(base, horizon * eps**tv_exponent),
        r_rate=max(base, horizon * eps**r_exponent),
    )
