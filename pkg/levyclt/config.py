"""
Configuration module for the Levy local-time CLT laboratory.

Implements a Config class pattern with environment-based settings.
All configuration is read from environment variables so that batch runs
can be steered from a shell, a CI job or a `.env` file without code changes.
"""

import os
from typing import Optional


def _float_list(raw: str) -> list[float]:
    """Parse a comma separated list of floats ("0.2,0.1,0.05")."""
    return [float(part) for part in raw.split(",") if part.strip()]


class BaseConfig:
    """Base configuration with defaults for all environments."""

    DEBUG: bool = False
    TESTING: bool = False

    # Logging
    LOG_LEVEL: str = os.environ.get("LOG_LEVEL", "INFO")
    LOG_FORMAT: str = os.environ.get("LOG_FORMAT", "json")  # 'json' or 'text'

    # Output
    OUT_DIR: str = os.environ.get("LEVYCLT_OUT_DIR", "results")

    # Worker pool; None means "let the executor decide"
    THREADS: Optional[int] = (
        int(os.environ["LEVYCLT_THREADS"]) if os.environ.get("LEVYCLT_THREADS") else None
    )

    # Reproducibility
    SEED: int = int(os.environ.get("LEVYCLT_SEED", "20240601"))

    # Quadrature
    QUAD_ABS_TOL: float = float(os.environ.get("LEVYCLT_QUAD_ABS_TOL", "1e-9"))

    # Monte Carlo defaults (desk-scale acceptance settings)
    N_PATHS: int = int(os.environ.get("LEVYCLT_N_PATHS", "2000"))
    N_STEPS: int = int(os.environ.get("LEVYCLT_N_STEPS", "100000"))
    H_SCHEDULE: list[float] = _float_list(os.environ.get("LEVYCLT_H_SCHEDULE", "0.2,0.1,0.05"))
    BINS_PER_H: int = int(os.environ.get("LEVYCLT_BINS_PER_H", "10"))


class DevConfig(BaseConfig):
    """Development configuration."""

    DEBUG: bool = True
    LOG_LEVEL: str = os.environ.get("LOG_LEVEL", "DEBUG")
    LOG_FORMAT: str = "text"


class TestConfig(BaseConfig):
    """Testing configuration."""

    TESTING: bool = True
    DEBUG: bool = True
    LOG_FORMAT: str = "text"

    # Small Monte Carlo runs for tests
    N_PATHS: int = 200
    N_STEPS: int = 2000
    THREADS: Optional[int] = 2
    SEED: int = 12345


class ProdConfig(BaseConfig):
    """Production (full acceptance run) configuration."""

    DEBUG: bool = False

    @classmethod
    def validate(cls) -> None:
        """Validate production configuration."""
        if cls.N_PATHS < 100:
            raise ValueError("LEVYCLT_N_PATHS must be at least 100 in production")
        if cls.THREADS is not None and cls.THREADS < 1:
            raise ValueError("LEVYCLT_THREADS must be a positive integer")
        if cls.QUAD_ABS_TOL <= 0:
            raise ValueError("LEVYCLT_QUAD_ABS_TOL must be positive")
        if not 5 <= cls.BINS_PER_H <= 20:
            raise ValueError("LEVYCLT_BINS_PER_H must lie in 5..20")


# Configuration mapping
config_by_name: dict[str, type[BaseConfig]] = {
    "development": DevConfig,
    "dev": DevConfig,
    "testing": TestConfig,
    "test": TestConfig,
    "production": ProdConfig,
    "prod": ProdConfig,
}


def get_config() -> BaseConfig:
    """Get configuration based on LEVYCLT_ENV environment variable."""
    env = os.environ.get("LEVYCLT_ENV", "development").lower()
    config_class = config_by_name.get(env, DevConfig)

    if config_class == ProdConfig:
        ProdConfig.validate()

    return config_class()
