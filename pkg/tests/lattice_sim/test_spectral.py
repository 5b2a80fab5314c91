"""Tests for rectangle-sum variances computed from spectral densities."""

import math

import numpy as np
import pytest

from src.coeff_families.families import isotropic_coeffs, isotropic_spectral_density, spectral_density_for
from src.core.exceptions import ParameterValidationError, ResourceLimitError
from src.core.schemas import ModelSpec
from src.lattice_sim.spectral import fejer_axis_rule, fejer_kernel, spectral_rectangle_variance, spectral_variance


def white_noise_density(x, y):
    return (2.0 * math.pi) ** -2 + 0.0 * x * y


def pair_difference_density(x, y):
    """(2 pi)^{-2} |1 - e^{iy}|^2 for the two-tap field."""
    return (2.0 * math.pi) ** -2 * 4.0 * np.sin(0.5 * y) ** 2 + 0.0 * x


class TestFejerRule:
    """Test cases for the kernel-weighted quadrature along one axis."""

    def test_kernel_matches_exponential_sum(self):
        w = np.array([0.0, 0.3, 1.1, 2.9])
        direct = np.abs(np.exp(1j * np.outer(w, np.arange(1, 8))).sum(axis=1)) ** 2
        np.testing.assert_allclose(fejer_kernel(7, w), direct, rtol=1e-12)

    @pytest.mark.parametrize("n", [1, 7, 64, 1000, 262144])
    def test_weights_integrate_kernel(self, n):
        """The integral of K_n over (0, pi) is pi n."""
        nodes, weights = fejer_axis_rule(n)
        assert nodes.min() > 0.0 and nodes.max() < math.pi
        assert weights.sum() == pytest.approx(math.pi * n, rel=1e-6)

    def test_empty_side(self):
        with pytest.raises(ParameterValidationError):
            fejer_axis_rule(0)


class TestSpectralVariance:
    """Test cases for the spectral rectangle variance."""

    @pytest.mark.parametrize("n1,n2", [(3, 5), (64, 8), (512, 4096)])
    def test_white_noise_counts_cells(self, n1, n2):
        assert spectral_variance(white_noise_density, n1, n2) == pytest.approx(n1 * n2, rel=1e-6)

    @pytest.mark.parametrize("n1,n2", [(50, 7), (5000, 7), (40, 3000)])
    def test_pair_difference_edge_variance(self, n1, n2):
        """Var S = 2 n1 for the two-tap field, whatever n2."""
        assert spectral_variance(pair_difference_density, n1, n2) == pytest.approx(2.0 * n1, rel=1e-6)

    def test_isotropic_matches_covariance_sum(self):
        """
        The isotropic autocovariance is itself an isotropic coefficient table with order 2d, so
        Var S = sum (n1 - |t|)(n2 - |s|) r(t, s) gives an independent value.
        """
        d, n1, n2 = -0.1, 5, 3
        r = isotropic_coeffs(2.0 * d, 4, J=50000).values
        t = np.arange(-4, 5)[:, None]
        s = np.arange(-4, 5)[None, :]
        weights = np.maximum(n1 - np.abs(t), 0) * np.maximum(n2 - np.abs(s), 0)
        expected = math.fsum((weights * r).ravel())
        density = lambda x, y: isotropic_spectral_density(d, x, y)
        assert spectral_variance(density, n1, n2) == pytest.approx(expected, rel=1e-4)

    def test_rectangle_from_scale(self):
        density = spectral_density_for(ModelSpec(family="isotropic", d=-0.1))
        assert spectral_rectangle_variance(density, 2.0, 8.0, (1.0, 1.0)) == pytest.approx(
            spectral_variance(density, 8, 64), rel=1e-14)

    def test_memory_budget(self):
        with pytest.raises(ResourceLimitError):
            spectral_variance(white_noise_density, 64, 64, memory_budget=1024)

    def test_only_isotropic_has_a_density(self):
        assert spectral_density_for(ModelSpec(family="pair_difference")) is None
        assert spectral_density_for(ModelSpec(family="synthetic", q1=4.0, q2=4.0)) is None
