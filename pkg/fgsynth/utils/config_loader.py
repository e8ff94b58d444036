"""Flat TOML configuration with CLI overrides."""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from core.exceptions import ConfigError, ResourceNotFoundError
from core.models.train_config import TrainConfig
from schemas.config_schemas import TrainConfigSchema
from utils.validation import validate_data

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)


def read_toml(path) -> Dict[str, Any]:
    """Read a flat TOML file; tables are rejected."""
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError('config file', path)
    try:
        with open(path, 'rb') as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Cannot parse {path}: {e}", details={'path': str(path)})
    nested = [key for key, value in data.items() if isinstance(value, dict)]
    if nested:
        raise ConfigError(
            f"Config must be flat key = value pairs; tables found: {', '.join(nested)}",
            details={key: ['Tables are not supported.'] for key in nested},
        )
    return data


def parse_overrides(pairs: Iterable[str]) -> Dict[str, str]:
    """Turn ``key=value`` strings into a mapping; values stay strings for the schema to coerce."""
    overrides = {}
    for pair in pairs or []:
        key, sep, value = pair.partition('=')
        if not sep or not key.strip():
            raise ConfigError(f"Override '{pair}' is not key=value", details={pair: ['Expected key=value.']})
        overrides[key.strip()] = value.strip()
    return overrides


def load_train_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> TrainConfig:
    """Defaults < file < overrides, validated by TrainConfigSchema."""
    data: Dict[str, Any] = read_toml(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = validate_data(TrainConfigSchema, data)
    logger.debug(f"Effective config: {config.to_dict()}")
    return config


def check_resume_compatible(config: TrainConfig, saved: Dict[str, Any]) -> None:
    """Fail if any architecture key differs between ``config`` and a saved config."""
    current = config.architecture()
    mismatched = {
        key: [f"checkpoint has {saved.get(key)!r}, config has {value!r}"]
        for key, value in current.items() if saved.get(key) != value
    }
    if mismatched:
        raise ConfigError(
            f"Resume config mismatch: {', '.join(sorted(mismatched))}",
            details=mismatched,
        )
