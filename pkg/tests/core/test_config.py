"""Tests for environment configuration and overrides."""

from pathlib import Path

import pytest

from src.core.config import AppConfig, ConfigManager, Environment, get_config
from src.core.exceptions import ConfigurationError


class TestConfigManager:
    """Test cases for ConfigManager."""

    def test_test_environment(self):
        config = get_config()
        assert config.environment == Environment.TEST
        assert config.log_level == "WARNING"
        assert config.memory_budget_mb <= 1024

    def test_production_log_level(self):
        assert ConfigManager.get_config("production").log_level == "ERROR"

    def test_invalid_environment(self):
        with pytest.raises(ConfigurationError) as exc_info:
            ConfigManager.get_config("staging")
        assert "staging" in str(exc_info.value)

    def test_environment_variables(self, monkeypatch):
        monkeypatch.setenv("LATTICESCALE_THREADS", "3")
        monkeypatch.setenv("LATTICESCALE_QUAD_TOL", "1e-7")
        config = ConfigManager.get_config("development")
        assert config.threads == 3
        assert config.quad_tol == 1e-7

    @pytest.mark.parametrize("value", ["zero", "0", "-2"])
    def test_invalid_numeric_setting(self, monkeypatch, value):
        monkeypatch.setenv("LATTICESCALE_THREADS", value)
        with pytest.raises(ConfigurationError):
            get_config()

    def test_overrides(self):
        ConfigManager.set_overrides(threads=4, quad_tol=None, output_dir="runs")
        config = get_config()
        assert config.threads == 4
        assert config.quad_tol == 1e-9
        assert config.output_dir == Path("runs")
        ConfigManager.clear_overrides()
        assert get_config().threads == 1

    def test_output_override(self, monkeypatch):
        assert ConfigManager.output_override() is None
        monkeypatch.setenv("LATTICESCALE_OUT", "elsewhere")
        assert ConfigManager.output_override() == Path("elsewhere")


class TestAppConfig:
    """Test cases for the frozen configuration record."""

    def test_memory_budget_bytes(self):
        assert AppConfig(environment=Environment.TEST, memory_budget_mb=2).memory_budget_bytes == 2 * 1024 * 1024

    def test_with_overrides_returns_copy(self):
        config = AppConfig(environment=Environment.TEST)
        updated = config.with_overrides(series_tol=1e-6, threads=None)
        assert updated.series_tol == 1e-6
        assert updated.threads == config.threads
        assert config.series_tol == 1e-4

    def test_frozen(self):
        config = AppConfig(environment=Environment.TEST)
        with pytest.raises(AttributeError):
            config.threads = 8
