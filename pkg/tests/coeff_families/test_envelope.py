"""Tests for the rho envelope, tail bounds and angular functions."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from src.coeff_families.angular import ANGULAR_SAMPLES, AngularFunction, heat_angular, isotropic_far_field_constant
from src.coeff_families.envelope import (
    RhoEnvelope,
    line_constant,
    rho,
    rho_tail_integral,
    rho_tail_mass,
)
from src.core.exceptions import ParameterValidationError


class TestRho:
    """Test cases for rho and its tail bounds."""

    def test_values(self):
        assert rho(1, 1, 2.0, 2.0) == pytest.approx(0.5)
        assert rho(-2, 0, 3.0, 5.0) == pytest.approx(1 / 8)

    def test_line_constant(self):
        assert line_constant(2.0) == pytest.approx(math.pi / 2)
        assert line_constant(4.0) == pytest.approx((math.pi / 4) / math.sin(math.pi / 4))

    def test_finite_support_has_no_tail(self):
        assert rho_tail_mass(math.inf, math.inf, 1, 1) == 0.0

    def test_tail_mass_decreases(self):
        assert rho_tail_mass(4.0, 4.0, 4, 4) > rho_tail_mass(4.0, 4.0, 8, 8) > 0.0

    def test_tail_mass_scales_like_inverse_square(self):
        """For q1 = q2 = 4 the bound is O(R^-2): doubling R divides it by about 4."""
        masses = [rho_tail_mass(4.0, 4.0, R, R) for R in (16, 32, 64)]
        assert masses[0] / masses[1] == pytest.approx(4.0, abs=0.1)
        assert masses[1] / masses[2] == pytest.approx(4.0, abs=0.1)

    def test_tail_mass_bounds_direct_sum(self):
        """The bound dominates a large finite sum of rho outside the window."""
        q, R, M = 4.0, 3, 400
        t = np.arange(-M, M + 1)[:, None]
        s = np.arange(-M, M + 1)[None, :]
        values = rho(t, s, q, q)
        outside = (np.abs(t) > R) | (np.abs(s) > R)
        partial = float(values[np.broadcast_to(outside, values.shape)].sum())
        assert partial <= rho_tail_mass(q, q, R, R)

    def test_not_summable(self):
        with pytest.raises(ParameterValidationError) as exc_info:
            rho_tail_mass(2.0, 2.0, 3, 3)
        assert "not summable" in str(exc_info.value)

    def test_tail_integral_decreases(self):
        assert rho_tail_integral(4.0, 5.0, 10.0, 10.0) > rho_tail_integral(4.0, 5.0, 100.0, 100.0) > 0.0


class TestRhoEnvelope:
    """Test cases for fitting the envelope constant."""

    def test_finite_support(self, pair_grid):
        assert RhoEnvelope.fit(pair_grid).C == 0.0

    def test_synthetic_constant_angular(self, synthetic_grid):
        """|a_inf| (t^4 + s^4) = (t^4 + s^4) / (t^2 + s^2)^2 peaks at 1 on the axes."""
        envelope = RhoEnvelope.fit(synthetic_grid)
        assert envelope.C == pytest.approx(1.0)
        assert envelope(1, 0) == pytest.approx(1.0)


class TestAngularFunction:
    """Test cases for sampled angular functions."""

    def test_constant(self):
        angular = AngularFunction.constant(2.0)
        assert angular.sup_norm == 2.0
        assert angular.is_constant
        assert angular(0.3) == pytest.approx(2.0)

    def test_from_callable_interpolates(self):
        angular = AngularFunction.from_callable(lambda z: z)
        assert angular.sup_norm == pytest.approx(1.0)
        assert angular(0.25) == pytest.approx(0.25)
        assert not angular.is_constant

    def test_scaled(self):
        assert AngularFunction.constant(1.5).scaled(-2.0).sup_norm == 3.0

    def test_wrong_sample_count(self):
        with pytest.raises(ParameterValidationError):
            AngularFunction(np.ones(ANGULAR_SAMPLES - 1))

    def test_unbounded_samples(self):
        with pytest.raises(ParameterValidationError):
            AngularFunction(np.full(ANGULAR_SAMPLES, np.inf))

    def test_isotropic_constant_is_negative(self):
        assert isotropic_far_field_constant(-0.3) < 0.0

    def test_heat_profile(self):
        angular = heat_angular(0.2, 0.5)
        assert angular(-0.5) == 0.0
        assert angular(0.0) == 0.0
        assert angular(1.0) == pytest.approx(1.0 / (gamma_fn(0.2) * math.sqrt(math.pi)))
        assert angular.sup_norm < np.inf
