"""
Spatial covariance functions.

Three kernel families are supported, each an immutable dataclass:

- `SquaredExponential(lengthscale)`: k(x, x') = exp(-r² / 2l²)
- `Matern(lengthscale, nu)`: closed forms at ν ∈ {1/2, 3/2, 5/2}, Bessel form otherwise
- `EmpiricalKernel(covariance)`: a fixed matrix over the index domain {0, ..., n-1}

For SE and Matérn the signal variance is 1, so k(x, x) = 1 exactly. Points are
rows of a 2-D array; a 1-D array passed where several points are expected is read
as a column of scalar points.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln, kv

from tvgp_bandit.utils.errors import ConfigError, KernelIndexError

# Distances below this (relative to the lengthscale) evaluate to exactly 1.
_ZERO_DISTANCE = 1e-12
_PSD_TOLERANCE = 1e-8
_CLOSED_FORM_NUS = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class SquaredExponential:
    lengthscale: float

    def __post_init__(self):
        if not self.lengthscale > 0:
            raise ConfigError(f"lengthscale must be positive, got {self.lengthscale}")

    def from_distances(self, r: np.ndarray) -> np.ndarray:
        scaled = r / self.lengthscale
        return np.exp(-0.5 * scaled**2)


@dataclass(frozen=True)
class Matern:
    lengthscale: float
    nu: float = 2.5

    def __post_init__(self):
        if not self.lengthscale > 0:
            raise ConfigError(f"lengthscale must be positive, got {self.lengthscale}")
        if not self.nu > 0:
            raise ConfigError(f"nu must be positive, got {self.nu}")

    def from_distances(self, r: np.ndarray) -> np.ndarray:
        if self.nu in _CLOSED_FORM_NUS:
            return matern_closed_form(r, self.lengthscale, self.nu)
        return matern_bessel(r, self.lengthscale, self.nu)


def matern_closed_form(r: np.ndarray, lengthscale: float, nu: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if nu == 0.5:
        return np.exp(-r / lengthscale)
    if nu == 1.5:
        z = np.sqrt(3.0) * r / lengthscale
        return (1.0 + z) * np.exp(-z)
    if nu == 2.5:
        z = np.sqrt(5.0) * r / lengthscale
        return (1.0 + z + z**2 / 3.0) * np.exp(-z)
    raise ConfigError(f"No closed form Matérn for nu={nu}")


def matern_bessel(r: np.ndarray, lengthscale: float, nu: float) -> np.ndarray:
    """General Matérn form 2^(1-ν)/Γ(ν) z^ν K_ν(z) with z = √(2ν) r / l."""
    r = np.asarray(r, dtype=float)
    z = np.sqrt(2.0 * nu) * r / lengthscale
    out = np.ones_like(z)
    positive = z > _ZERO_DISTANCE
    zp = z[positive]
    # log-space prefactor keeps Γ(ν) and z^ν finite for large ν
    log_prefactor = (1.0 - nu) * np.log(2.0) - gammaln(nu) + nu * np.log(zp)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.exp(log_prefactor) * kv(nu, zp)
    out[positive] = np.nan_to_num(values, nan=0.0, posinf=1.0)
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class EmpiricalKernel:
    """
    Kernel given by a covariance matrix over an indexed finite domain.

    `raw_scale` records the factor the source covariance was divided by, so that
    callers can map readings into the kernel's units (divide by √raw_scale).
    """

    covariance: np.ndarray
    raw_scale: float = 1.0

    def __post_init__(self):
        matrix = np.array(self.covariance, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
            raise ConfigError(f"Empirical covariance must be square, got {matrix.shape}")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
            raise ConfigError("Empirical covariance must be symmetric")
        diagonal = np.diag(matrix)
        if np.any(diagonal <= 0.0) or np.any(diagonal > 1.0 + 1e-12):
            raise ConfigError("Empirical covariance diagonal must lie in (0, 1]")
        smallest = float(np.linalg.eigvalsh(matrix).min())
        if smallest < -_PSD_TOLERANCE:
            raise ConfigError(
                f"Empirical covariance is not PSD (smallest eigenvalue {smallest:.3e})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "covariance", matrix)

    @classmethod
    def from_matrix(
        cls, matrix: np.ndarray, signal_variance: float = 1.0
    ) -> "EmpiricalKernel":
        """Symmetrize as (A + Aᵀ)/2 and rescale so the largest diagonal entry
        equals `signal_variance` (≤ 1)."""
        if not 0.0 < signal_variance <= 1.0:
            raise ConfigError(f"signal_variance must be in (0, 1], got {signal_variance}")
        matrix = np.asarray(matrix, dtype=float)
        symmetric = 0.5 * (matrix + matrix.T)
        top = float(np.max(np.diag(symmetric)))
        if not top > 0.0:
            raise ConfigError("Empirical covariance has no positive diagonal entry")
        scale = top / signal_variance
        return cls(covariance=symmetric / scale, raw_scale=scale)

    @property
    def size(self) -> int:
        return self.covariance.shape[0]

    def indices(self, points: np.ndarray) -> np.ndarray:
        flat = np.asarray(points).reshape(-1)
        as_int = flat.astype(int)
        if not np.array_equal(as_int, flat) or np.any(as_int < 0) or np.any(
            as_int >= self.size
        ):
            raise KernelIndexError(
                f"Empirical kernel indices must be integers in [0, {self.size}), "
                f"got {flat.tolist()}"
            )
        return as_int


KernelSpec = Union[SquaredExponential, Matern, EmpiricalKernel]


def as_points(points) -> np.ndarray:
    """Coerce to an (n, d) float array; 1-D input is a column of scalar points."""
    array = np.asarray(points, dtype=float)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(-1, 1)
    return array


def kernel_matrix(
    spec: KernelSpec, points, other: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Kernel matrix [k(x, x')] between `points` and `other` (defaults to `points`).

    :param spec: The kernel
    :param points: Sequence of points (or indices for an empirical kernel)
    :param other: Optional second sequence of points
    :return: Matrix of shape (len(points), len(other))
    """
    if isinstance(spec, EmpiricalKernel):
        rows = spec.indices(points)
        cols = rows if other is None else spec.indices(other)
        return np.array(spec.covariance[np.ix_(rows, cols)])

    left = as_points(points)
    right = left if other is None else as_points(other)
    if left.shape[1] != right.shape[1]:
        raise ConfigError(f"Dimension mismatch: {left.shape[1]} vs {right.shape[1]}")
    distances = cdist(left, right, metric="euclidean")
    matrix = spec.from_distances(distances)
    if other is None:
        # cdist is exact on the diagonal but keep the result exactly symmetric
        matrix = 0.5 * (matrix + matrix.T)
        np.fill_diagonal(matrix, 1.0)
    return matrix


def eval_kernel(spec: KernelSpec, x, x_prime) -> float:
    """k(x, x') for single points (or single indices for an empirical kernel)."""
    if isinstance(spec, EmpiricalKernel):
        i, j = spec.indices(np.atleast_1d(x)), spec.indices(np.atleast_1d(x_prime))
        if i.size != 1 or j.size != 1:
            raise ConfigError("eval_kernel expects single indices")
        return float(spec.covariance[i[0], j[0]])
    left = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    right = np.atleast_1d(np.asarray(x_prime, dtype=float)).reshape(1, -1)
    return float(kernel_matrix(spec, left, right)[0, 0])


def prior_variance(spec: KernelSpec, points) -> np.ndarray:
    """Diagonal k(x, x) for each point."""
    if isinstance(spec, EmpiricalKernel):
        return np.array(np.diag(spec.covariance)[spec.indices(points)])
    return np.ones(as_points(points).shape[0])


def kernel_family(spec: KernelSpec) -> str:
    if isinstance(spec, SquaredExponential):
        return "se"
    if isinstance(spec, Matern):
        return "matern"
    return "empirical"


def matern_growth_exponent(nu: float, dim: int) -> float:
    """c = d(d+1) / (2ν + d(d+1)), the Matérn information-growth exponent."""
    if not nu > 0 or dim < 1:
        raise ConfigError(f"bad Matérn exponent inputs nu={nu}, dim={dim}")
    spread = dim * (dim + 1)
    return spread / (2.0 * nu + spread)
