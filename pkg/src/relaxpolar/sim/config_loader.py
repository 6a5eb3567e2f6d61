"""Load and validate relaxpolar.toml configuration."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from relaxpolar.exceptions import ConfigurationError
from relaxpolar.sim.config_models import SimConfig

CONFIG_NAME = "relaxpolar.toml"


def load_config(config_path: Path) -> SimConfig:
    """Parse a relaxpolar.toml into a validated SimConfig; every failure becomes a ConfigurationError."""
    if not config_path.is_file():
        raise ConfigurationError(f"Config file not found: {config_path}")
    try:
        with config_path.open("rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"Invalid TOML in {config_path.name}: {exc}") from exc
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config file {config_path}: {exc}") from exc
    return validate_config(data)


def validate_config(data: dict[str, Any]) -> SimConfig:
    try:
        return SimConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"Config validation error: {exc}") from exc


def find_config(start: Path | None = None) -> Path:
    """Search for relaxpolar.toml starting from `start` (default: cwd) upward."""
    current = (start or Path.cwd()).resolve()
    while True:
        candidate = current / CONFIG_NAME
        if candidate.is_file():
            return candidate
        parent = current.parent
        if parent == current:
            raise ConfigurationError(f"No {CONFIG_NAME} found in current directory or any parent")
        current = parent


def merge_overrides(config: SimConfig, overrides: dict[str, dict[str, Any]]) -> SimConfig:
    """Apply per-section overrides (e.g. from CLI flags) and re-validate.

    Setting a channel parameter or a code target clears its alternatives so
    the section stays unambiguous.
    """
    exclusive = {"channel": ("p", "snr_db", "capacity"), "code": ("rate", "fer_target")}
    data = config.model_dump()
    for section, values in overrides.items():
        if not values:
            continue
        target = data.setdefault(section, {})
        keys = exclusive.get(section, ())
        if any(k in values for k in keys):
            for key in keys:
                target[key] = None
        target.update(values)
    return validate_config(data)
