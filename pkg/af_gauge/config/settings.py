"""
Settings module for af-gauge.

Process-level settings (logging, default output location, default seed,
worker threads) loaded from AF_GAUGE_* environment variables, optionally
through a .env file. Run-specific parameters live in run_config.
"""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..exceptions import ConfigError

ENV_PREFIX = "AF_GAUGE_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Application settings loaded from environment variables."""

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[Path] = Field(default=None, description="Optional log file path")
    log_format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string"
    )

    # Run Defaults
    output_dir: Path = Field(default=Path("./output"), description="Default output directory")
    default_seed: int = Field(default=0, description="Seed used when a config does not set one")
    max_workers: int = Field(default=1, description="Threads for concurrent restarts")

    # Development Settings
    debug: bool = Field(default=False, description="Debug mode")
    testing: bool = Field(default=False, description="Testing mode")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        """Accept any case; the value must name one of LOG_LEVELS."""
        level = str(v).strip().upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Unknown log level {v!r}; expected one of {', '.join(LOG_LEVELS)}")
        return level

    @field_validator("default_seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        """Seeds are unsigned 64-bit integers."""
        if not 0 <= v < 2 ** 64:
            raise ValueError("Seed must be an unsigned 64-bit integer")
        return v

    @field_validator("max_workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("max_workers must be at least 1")
        return v

    @field_validator("output_dir")
    @classmethod
    def validate_directories(cls, v: Path) -> Path:
        """Ensure the output path is not an existing file."""
        if v.exists() and not v.is_dir():
            raise ValueError(f"Path {v} exists but is not a directory")
        return v


def _environment_values() -> dict:
    values = {}
    for name in Settings.model_fields:
        raw = os.environ.get(f"{ENV_PREFIX}{name.upper()}")
        if raw is not None and raw != "":
            values[name] = raw
    return values


def load_settings(env_file: Optional[str] = None) -> Settings:
    """
    Load application settings from environment variables.

    Args:
        env_file: Optional path to .env file to load

    Returns:
        Settings object with loaded configuration

    Raises:
        ConfigError: if an AF_GAUGE_* variable holds an invalid value
    """
    if env_file:
        load_dotenv(env_file)
    else:
        # Try to load from common locations
        for env_path in [".env", "../.env"]:
            if os.path.exists(env_path):
                load_dotenv(env_path)
                break

    try:
        return Settings(**_environment_values())
    except ValidationError as e:
        problems = "; ".join(
            f"{ENV_PREFIX}{'_'.join(str(part) for part in error['loc']).upper()}: {error['msg']}"
            for error in e.errors()
        )
        raise ConfigError(f"Invalid settings: {problems}") from e


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Return the process-wide settings, loading them on first use."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings
