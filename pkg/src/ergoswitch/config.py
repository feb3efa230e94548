"""Configuration and logging setup for ergoswitch."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Use tomllib for Python 3.11+, tomli for 3.10
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# Default config file location
CONFIG_FILE_PATH = Path.home() / ".config" / "ergoswitch" / "config.toml"

_VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _load_config_file(config_path: Path | None = None) -> dict[str, Any]:
    """Load configuration from TOML file if it exists.

    Args:
        config_path: Path to config file. Defaults to ~/.config/ergoswitch/config.toml

    Returns:
        Dictionary of configuration values, empty dict if file doesn't exist
    """
    path = config_path or CONFIG_FILE_PATH
    if not path.exists():
        return {}

    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        # Config file is optional; a broken one must not stop a run
        logging.getLogger(__name__).warning(
            "Failed to load config file %s: %s", path, type(e).__name__
        )
        return {}


class Settings(BaseSettings):
    """ergoswitch runtime settings.

    Settings are loaded in priority order:
    1. Environment variables (highest priority)
    2. .env file
    3. ~/.config/ergoswitch/config.toml (lowest priority)

    These are process-wide knobs (parallelism, logging, limits). Anything
    that defines a computation lives in the run configuration instead.
    """

    model_config = SettingsConfigDict(
        env_prefix="ERGOSWITCH_",
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # Worker cap for sweeps and the optimizer grid (ERGOSWITCH_THREADS)
    threads: int = Field(default=1, ge=1)

    # Logging
    log_level: str = "INFO"

    # Run defaults
    default_seed: int = 42
    results_dir: str = "results"

    # Oracle residual above this makes `run` exit with code 3
    residual_limit: float = Field(default=1e-8, gt=0.0)

    # Tolerance for is_passive when callers do not pass one
    passivity_tol: float = Field(default=1e-9, gt=0.0)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is a stdlib logging level name."""
        if v.upper() not in _VALID_LOG_LEVELS:
            msg = f"Invalid log level '{v}'. Must be one of {', '.join(_VALID_LOG_LEVELS)}."
            raise ValueError(msg)
        return v.upper()

    @model_validator(mode="before")
    @classmethod
    def load_from_config_file(cls, values: dict[str, Any]) -> dict[str, Any]:
        """Load values from config file for any fields not set via env vars."""
        config_data = _load_config_file()

        if not config_data:
            return values

        # Config file uses same keys as settings fields
        config_keys = [
            "threads",
            "log_level",
            "default_seed",
            "results_dir",
            "residual_limit",
            "passivity_tol",
        ]

        for key in config_keys:
            # Only use config file value if not already set (env var takes precedence)
            if key not in values or values[key] is None:
                if key in config_data:
                    values[key] = config_data[key]

        return values


_settings: Settings | None = None


def get_settings() -> Settings:
    """Get the singleton Settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Reset the singleton Settings instance.

    Primarily used for testing to ensure fresh settings are loaded.
    """
    global _settings
    _settings = None


def configure_logging(level: str = "INFO") -> None:
    """Configure stdlib logging for ergoswitch.

    Logs go to stderr; stdout is reserved for machine-readable reports.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


__all__ = [
    "Settings",
    "get_settings",
    "reset_settings",
    "configure_logging",
    "CONFIG_FILE_PATH",
]
