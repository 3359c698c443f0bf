import numpy as np
import pytest

from tvgp_bandit.kernel.kernels import (
    EmpiricalKernel,
    Matern,
    SquaredExponential,
    eval_kernel,
    kernel_family,
    kernel_matrix,
    matern_bessel,
    matern_closed_form,
    matern_growth_exponent,
    prior_variance,
)
from tvgp_bandit.utils.errors import ConfigError, KernelIndexError


def test_se_known_value():
    kernel = SquaredExponential(lengthscale=0.5)
    # r = 0.5 -> exp(-0.5)
    assert eval_kernel(kernel, [0.0, 0.0], [0.3, 0.4]) == pytest.approx(np.exp(-0.5))


def test_unit_diagonal_and_symmetry(rng, se_kernel, matern_kernel):
    points = rng.uniform(size=(12, 2))
    for kernel in (se_kernel, matern_kernel, Matern(0.3, nu=0.5), Matern(0.3, nu=3.2)):
        matrix = kernel_matrix(kernel, points)
        assert np.array_equal(np.diag(matrix), np.ones(12))
        assert np.array_equal(matrix, matrix.T)
        assert np.all(matrix <= 1.0) and np.all(matrix >= 0.0)
        assert np.linalg.eigvalsh(matrix).min() > -1e-8


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.5])
def test_matern_bessel_matches_closed_forms(nu):
    r = np.linspace(0.0, 2.0, 41)
    assert np.allclose(
        matern_bessel(r, 0.4, nu), matern_closed_form(r, 0.4, nu), atol=1e-10
    )


def test_matern_half_is_exponential():
    kernel = Matern(lengthscale=1.0, nu=0.5)
    assert eval_kernel(kernel, 0.0, 2.0) == pytest.approx(np.exp(-2.0))


def test_cross_matrix_shape(se_kernel):
    left = np.zeros((3, 2))
    right = np.ones((5, 2))
    assert kernel_matrix(se_kernel, left, right).shape == (3, 5)


def test_dimension_mismatch(se_kernel):
    with pytest.raises(ConfigError):
        kernel_matrix(se_kernel, np.zeros((2, 2)), np.zeros((2, 3)))


@pytest.mark.parametrize("lengthscale", [0.0, -1.0])
def test_bad_lengthscale(lengthscale):
    with pytest.raises(ConfigError):
        SquaredExponential(lengthscale)
    with pytest.raises(ConfigError):
        Matern(lengthscale)


def test_empirical_kernel_indexing():
    kernel = EmpiricalKernel(np.array([[1.0, 0.5], [0.5, 0.8]]))
    assert kernel.size == 2
    assert eval_kernel(kernel, 0, 1) == 0.5
    assert np.array_equal(prior_variance(kernel, [0, 1]), [1.0, 0.8])
    assert kernel_matrix(kernel, [1, 0]).tolist() == [[0.8, 0.5], [0.5, 1.0]]


@pytest.mark.parametrize("index", [2, -1, 0.5])
def test_empirical_kernel_bad_index(index):
    kernel = EmpiricalKernel(np.eye(2))
    with pytest.raises(KernelIndexError):
        kernel_matrix(kernel, [index])


@pytest.mark.parametrize(
    "matrix",
    [
        np.array([[1.0, 0.2], [0.3, 1.0]]),  # asymmetric
        np.array([[1.0, 2.0], [2.0, 1.0]]),  # indefinite
        np.array([[2.0, 0.0], [0.0, 1.0]]),  # diagonal above 1
        np.ones((2, 3)),
    ],
)
def test_empirical_kernel_rejects(matrix):
    with pytest.raises(ConfigError):
        EmpiricalKernel(matrix)


def test_from_matrix_rescales():
    kernel = EmpiricalKernel.from_matrix(np.array([[4.0, 1.0], [1.0, 2.0]]))
    assert kernel.raw_scale == 4.0
    assert np.allclose(kernel.covariance, [[1.0, 0.25], [0.25, 0.5]])


def test_family_and_growth_exponent(se_kernel, matern_kernel):
    assert kernel_family(se_kernel) == "se"
    assert kernel_family(matern_kernel) == "matern"
    assert kernel_family(EmpiricalKernel(np.eye(1))) == "empirical"
    # d = 2: 6 / (5 + 6)
    assert matern_growth_exponent(2.5, 2) == pytest.approx(6 / 11)
