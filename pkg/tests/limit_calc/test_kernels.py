"""Tests for the limit kernels, their norms and the V0 covariance."""

import math

import pytest
from scipy.integrate import dblquad, quad

from src.coeff_families.angular import AngularFunction, a_infinity
from src.core.exceptions import BoundaryRegionError, DivergentIntegralError, UnsupportedRegionError
from src.core.schemas import KernelKind
from src.limit_calc.kernels import (
    KernelSpec,
    ProfileTable,
    angular_integrals,
    kernel_h,
    line_kernel,
    line_kernel_integral,
)
from src.limit_calc.norms import sigma_norm, sigma_norms
from src.limit_calc.v0 import axis_rule, h0_tail_bound, v0_covariance

UNIT = AngularFunction.constant(1.0)


class TestAngularIntegrals:
    """Test cases for the line integrals of a_inf."""

    def test_constant_angular_quartic(self):
        """int (1 + s^2)^{-2} ds = pi / 2 along both axes."""
        L1p, L1m, L2p, L2m = angular_integrals(4.0, 4.0, UNIT)
        for value in (L1p, L1m, L2p, L2m):
            assert value == pytest.approx(math.pi / 2, rel=1e-7)

    def test_divergent_line_integral(self):
        with pytest.raises(DivergentIntegralError):
            angular_integrals(4.0, 0.9, UNIT)

    def test_antiderivative_table(self):
        table = ProfileTable.build(lambda w: (1.0 + w * w) ** -2, 4.0, 1.0, 1.0)
        assert table.total == pytest.approx(math.pi / 2, rel=1e-8)
        assert float(table(0.0)) == pytest.approx(0.0, abs=1e-12)
        assert float(table(1.0)) == pytest.approx(0.25 + math.pi / 8, abs=1e-4)
        assert float(table(-1.0)) == pytest.approx(-(0.25 + math.pi / 8), abs=1e-4)


class TestLineKernel:
    """Test cases for the closed form of the one-dimensional line kernel."""

    @pytest.mark.parametrize("H,u", [
        (0.3, -0.5), (0.3, 0.4), (0.3, 1.7),
        (0.8, -0.5), (0.8, 0.4), (0.8, 1.7),
    ])
    def test_closed_form_matches_integral(self, H, u):
        closed = float(line_kernel(1.3, 0.6, H, 1.0, u))
        integral = line_kernel_integral(1.3, 0.6, 1.5 - H, 1.0, u, tol=1e-12)
        assert closed == pytest.approx(integral, rel=1e-6)

    def test_singular_at_half(self):
        with pytest.raises(BoundaryRegionError):
            line_kernel(1.0, 1.0, 0.5, 1.0, 0.2)

    def test_kernel_h1_indicator(self):
        spec = KernelSpec.build(KernelKind.H1, 1.6, 8.0, UNIT)
        assert kernel_h(spec, (1.0, 1.0), (0.3, 1.5)) == 0.0
        assert kernel_h(spec, (1.0, 1.0), (0.3, 0.5)) != 0.0

    def test_kernel_h1_closed_and_integral(self):
        spec = KernelSpec.build(KernelKind.H1, 1.6, 8.0, UNIT)
        closed = kernel_h(spec, (1.0, 1.0), (-0.4, 0.5), form="closed")
        integral = kernel_h(spec, (1.0, 1.0), (-0.4, 0.5), form="integral")
        assert closed == pytest.approx(integral, rel=1e-6)

    def test_rectangle_must_be_positive(self):
        spec = KernelSpec.build(KernelKind.H1, 1.6, 8.0, UNIT)
        with pytest.raises(UnsupportedRegionError):
            kernel_h(spec, (0.0, 1.0), (0.5, 0.5))

    def test_derived_exponents(self):
        spec = KernelSpec.build(KernelKind.H1, 1.6, 8.0, UNIT)
        assert spec.H1 == pytest.approx(0.1)
        assert spec.kappa == pytest.approx(0.2)
        assert spec.Q == pytest.approx(0.75)


class TestKernelH0:
    """Test cases for the two-dimensional kernel h0."""

    def test_matches_direct_quadrature_outside_rectangle(self):
        q1 = q2 = 2.2
        spec = KernelSpec.build(KernelKind.H0, q1, q2, UNIT)
        rect, point = (1.0, 1.0), (3.0, 0.5)
        expected, _ = dblquad(lambda s, t: float(a_infinity(t - point[0], s - point[1], q1, q2, UNIT)),
                              0.0, rect[0], 0.0, rect[1], epsabs=1e-13)
        assert kernel_h(spec, rect, point) == pytest.approx(expected, rel=5e-4)

    def test_symmetric_model_swaps_coordinates(self):
        spec = KernelSpec.build(KernelKind.H0, 2.2, 2.2, UNIT)
        first = kernel_h(spec, (1.0, 2.0), (2.5, -0.7))
        second = kernel_h(spec, (2.0, 1.0), (-0.7, 2.5))
        assert first == pytest.approx(second, rel=5e-4)


class TestTildeKernels:
    """Test cases for the line-integrated kernels h1_tilde and h2_tilde."""

    def setup_method(self):
        self.q1 = self.q2 = 2.2

    def test_h1_tilde_matches_direct_quadrature(self):
        spec = KernelSpec.build(KernelKind.H1_TILDE, self.q1, self.q2, UNIT)
        expected, _ = quad(lambda s: float(a_infinity(0.7, s - 0.3, self.q1, self.q2, UNIT)), 0.0, 1.0,
                           points=[0.3], epsabs=1e-12)
        assert kernel_h(spec, (2.0, 1.0), (0.7, 0.3)) == pytest.approx(2.0 * expected, rel=1e-3)

    def test_h2_tilde_matches_direct_quadrature(self):
        spec = KernelSpec.build(KernelKind.H2_TILDE, self.q1, self.q2, UNIT)
        expected, _ = quad(lambda t: float(a_infinity(t - 0.4, -0.6, self.q1, self.q2, UNIT)), 0.0, 1.5,
                           points=[0.4], epsabs=1e-12)
        assert kernel_h(spec, (1.5, 0.5), (0.4, -0.6)) == pytest.approx(0.5 * expected, rel=1e-3)


class TestSigmaNorms:
    """Test cases for the L2 norms of the line kernels."""

    def test_reduced_matches_planar(self):
        spec = KernelSpec.build(KernelKind.H1, 1.6, 8.0, UNIT)
        reduced, _ = sigma_norm(spec, "reduced", tol=1e-10)
        planar, _ = sigma_norm(spec, "planar", tol=1e-10)
        assert reduced > 0.0
        assert planar == pytest.approx(reduced, rel=1e-5)

    def test_divergent_norm(self):
        spec = KernelSpec.build(KernelKind.H1, 4.0, 4.0, UNIT)
        with pytest.raises(DivergentIntegralError):
            sigma_norm(spec)

    def test_h0_has_no_fixed_norm(self):
        spec = KernelSpec.build(KernelKind.H0, 2.2, 2.2, UNIT)
        with pytest.raises(UnsupportedRegionError):
            sigma_norm(spec)

    def test_available_norms(self):
        norms = sigma_norms(1.6, 8.0, UNIT)
        assert norms.sigma1 is not None and norms.sigma1 > 0.0
        assert norms.sigma2 is None


class TestV0Covariance:
    """Test cases for the balanced limit covariance, on coarse quadrature settings."""

    def test_symmetric_and_positive(self):
        p1, p2 = (1.0, 1.0), (0.5, 1.5)
        cov12, bound = v0_covariance(2.2, 2.2, UNIT, p1, p2, rel_tol=1e-2, panels=4, order=3)
        cov21, _ = v0_covariance(2.2, 2.2, UNIT, p2, p1, rel_tol=1e-2, panels=4, order=3)
        var1, _ = v0_covariance(2.2, 2.2, UNIT, p1, p1, rel_tol=1e-2, panels=4, order=3)
        var2, _ = v0_covariance(2.2, 2.2, UNIT, p2, p2, rel_tol=1e-2, panels=4, order=3)
        assert cov12 == pytest.approx(cov21, rel=1e-12)
        assert var1 > 0.0 and var2 > 0.0
        assert bound >= 0.0

    def test_needs_balanced_region(self):
        with pytest.raises(UnsupportedRegionError):
            v0_covariance(4.0, 4.0, UNIT, (1.0, 1.0), (1.0, 1.0))

    def test_axis_rule_covers_box(self):
        nodes, weights = axis_rule([1.0, 2.0], 3.0, 6, 4)
        assert nodes.min() > -3.0 and nodes.max() < 5.0
        assert weights.sum() == pytest.approx(8.0)

    def test_tail_bound_decreases(self):
        near = h0_tail_bound(2.2, 2.2, 1.0, (1.0, 1.0), 10.0, 10.0)
        far = h0_tail_bound(2.2, 2.2, 1.0, (1.0, 1.0), 100.0, 100.0)
        assert far < near
