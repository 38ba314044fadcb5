"""
Configuration Management for the Affinity Network Simulator
Environment-based runtime settings plus model parameter files
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models import ConfigFile, Params, violations_from_error


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables (AFFSIM_*)"""

    model_config = SettingsConfigDict(env_prefix="AFFSIM_", env_file=".env", env_file_encoding="utf-8", extra="ignore")

    app_name: str = "Affinity Network Simulator"
    app_version: str = "1.0.0"

    # Logging
    log_level: str = "INFO"

    # Output
    output_dir: str = "results"

    # Experiments
    n_jobs: int = 1
    replications: int = 20
    baseline_replications: int = 30


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


class ConfigError(ValueError):
    """A configuration file or override could not be turned into valid Params"""


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a key=value parameter file into Params field values"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: config file not found")

    raw = {key: value for key, value in dotenv_values(path).items() if value is not None}
    try:
        parsed = ConfigFile.model_validate(raw)
    except ValidationError as e:
        details = "; ".join(_describe(err) for err in e.errors())
        raise ConfigError(f"{path}: {details}") from e
    return parsed.model_dump(exclude_none=True)


def _describe(err: Mapping[str, Any]) -> str:
    key = err["loc"][0] if err.get("loc") else "<file>"
    if err.get("type") == "extra_forbidden":
        return f"unknown key '{key}'"
    return f"{key}: {err['msg']} (got {err.get('input')!r})"


def parse_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Params:
    """
    Build Params from defaults, then the config file, then explicit overrides

    Overrides use Params field names; entries set to None are ignored.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        values.update(read_config_file(path))
    if overrides:
        values.update({key: value for key, value in overrides.items() if value is not None})

    try:
        return Params.model_validate(values)
    except ValidationError as e:
        raise ConfigError("; ".join(str(v) for v in violations_from_error(e))) from e
