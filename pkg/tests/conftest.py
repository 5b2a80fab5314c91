import pytest

from src.coeff_families.angular import AngularFunction
from src.coeff_families.families import (
    heat_coeffs,
    isotropic_coeffs,
    pair_difference_coeffs,
    separable_coeffs,
    synthetic_coeffs,
)
from src.core.config import ConfigManager


@pytest.fixture(autouse=True)
def test_environment(monkeypatch):
    """Run every test under the test environment with no command-line overrides."""
    monkeypatch.setenv("ENVIRONMENT", "test")
    monkeypatch.delenv("LATTICESCALE_OUT", raising=False)
    ConfigManager.clear_overrides()
    yield
    ConfigManager.clear_overrides()


@pytest.fixture(scope="session")
def pair_grid():
    """The two-tap field X(t, s) = eps(t, s) - eps(t, s - 1)."""
    return pair_difference_coeffs()


@pytest.fixture(scope="session")
def isotropic_grid():
    """Small isotropic grid with a fixed series length, d = -0.1 (q = 2.2)."""
    return isotropic_coeffs(-0.1, 3, J=64)


@pytest.fixture(scope="session")
def heat_grid():
    return heat_coeffs(-0.2, 0.5, 4)


@pytest.fixture(scope="session")
def separable_grid():
    return separable_coeffs(-0.2, -0.3, 4, 5)


@pytest.fixture(scope="session")
def synthetic_grid():
    """q1 = q2 = 4 with a constant angular function, in the two-sided edge region."""
    return synthetic_coeffs(4.0, 4.0, AngularFunction.constant(1.0), 6, 6)
