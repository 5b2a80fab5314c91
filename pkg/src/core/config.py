"""Configuration management for latticescale runs."""

import os
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.core.exceptions import ConfigurationError


class Environment(Enum):
    """Environment types for configuration."""
    TEST = "test"
    DEVELOPMENT = "development"
    PRODUCTION = "production"


@dataclass(frozen=True)
class AppConfig:
    """Main application configuration."""
    environment: Environment
    output_dir: Path = Path("outputs")
    log_level: str = "INFO"

    # Worker pool and memory
    threads: int = 1
    memory_budget_mb: int = 2048

    # Numerical tolerances
    classify_tol: float = 1e-9
    quad_tol: float = 1e-9
    series_tol: float = 1e-4
    series_factor: float = 4.0
    series_cap: int = 1 << 22

    @property
    def memory_budget_bytes(self) -> int:
        return self.memory_budget_mb * 1024 * 1024

    def with_overrides(self, **overrides: Any) -> "AppConfig":
        """Return a copy with the non-None overrides applied."""
        values = {k: v for k, v in overrides.items() if v is not None}
        if "output_dir" in values:
            values["output_dir"] = Path(values["output_dir"])
        return replace(self, **values)


class ConfigManager:
    """Manages configuration across different environments."""

    _overrides: Dict[str, Any] = {}

    @classmethod
    def get_config(cls, environment: Optional[str] = None) -> AppConfig:
        """
        Get configuration for the specified environment.

        Args:
            environment (str, optional): Environment name. If None, determined from env vars.

        Returns:
            AppConfig: Configuration object for the environment

        Raises:
            ConfigurationError: If the environment name or a numeric setting is invalid
        """
        load_dotenv()

        if environment is None:
            environment = os.getenv("ENVIRONMENT", "development").lower()

        try:
            env_enum = Environment(environment)
        except ValueError:
            valid_envs = [e.value for e in Environment]
            raise ConfigurationError(f"Invalid environment '{environment}'. Valid options: {valid_envs}")

        settings = cls._get_environment_settings(env_enum)
        return AppConfig(environment=env_enum, **settings).with_overrides(**cls._overrides)

    @classmethod
    def set_overrides(cls, **overrides: Any) -> None:
        """Process-wide overrides from the command line, applied on top of the environment."""
        cls._overrides = {k: v for k, v in overrides.items() if v is not None}

    @classmethod
    def clear_overrides(cls) -> None:
        cls._overrides = {}

    @classmethod
    def _get_environment_settings(cls, environment: Environment) -> Dict[str, Any]:
        """Get environment-specific settings."""

        base_settings = {
            "output_dir": Path(os.getenv("LATTICESCALE_OUT", "outputs")),
            "log_level": os.getenv("LOG_LEVEL", "INFO").upper(),
            "threads": _positive("LATTICESCALE_THREADS", int, "1"),
            "memory_budget_mb": _positive("LATTICESCALE_MEMORY_MB", int, "2048"),
            "classify_tol": _positive("LATTICESCALE_CLASSIFY_TOL", float, "1e-9"),
            "quad_tol": _positive("LATTICESCALE_QUAD_TOL", float, "1e-9"),
            "series_tol": _positive("LATTICESCALE_SERIES_TOL", float, "1e-4"),
            "series_factor": _positive("LATTICESCALE_SERIES_FACTOR", float, "4.0"),
        }

        # Environment-specific overrides
        if environment == Environment.TEST:
            base_settings.update({
                "memory_budget_mb": min(base_settings["memory_budget_mb"], 1024),
                "log_level": "WARNING"
            })
        elif environment == Environment.PRODUCTION:
            base_settings.update({
                "log_level": "ERROR"
            })

        return base_settings

    @classmethod
    def output_override(cls) -> Optional[Path]:
        """LATTICESCALE_OUT, when set, wins over any --out flag."""
        value = os.getenv("LATTICESCALE_OUT")
        return Path(value) if value else None


def _positive(name: str, kind: type, default: str):
    raw = os.getenv(name, default)
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigurationError(f"{name}={raw!r} is not a valid {kind.__name__}")
    if value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {raw}")
    return value


# Convenience function for getting current config
def get_config() -> AppConfig:
    """Get configuration for the current environment."""
    return ConfigManager.get_config()
