"""
Configuration helpers: environment values and YAML parameter files.
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from dotenv import find_dotenv, load_dotenv  # type: ignore

from pyrangeclust.utils.exceptions import ConfigurationError

DEFAULTS = {
    "RC_THREADS": "1",
    "RC_LOG_LEVEL": "INFO",
}


def load_environment() -> None:
    """
    Load a `.env` file found upwards from the working directory, without
    overriding variables already present in the process environment.
    """
    path = find_dotenv(usecwd=True)
    if path:
        load_dotenv(path, override=False)
        logging.debug(f"Environment loaded from {path}")


def get_configs(keys: Union[List[str], str]) -> Union[str, Dict[str, str]]:
    """
    Load environment variables, falling back to the package defaults.

    Parameters
    ----------
    keys: Union[list[str], str]
        Specific keys to return.

    Returns
    -------
    Union[str, dict[str, str]]
    """
    if isinstance(keys, str):
        return os.environ.get(keys, DEFAULTS.get(keys, ""))
    elif isinstance(keys, list):
        return {k: os.environ.get(k, DEFAULTS.get(k, "")) for k in keys}
    else:
        raise TypeError("The given type is not valid")


def thread_count() -> int:
    """
    Number of worker threads allowed by `RC_THREADS`.

    Returns
    -------
    int
        At least 1.
    """
    raw = get_configs("RC_THREADS")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"RC_THREADS must be an integer, got '{raw}'")
    if value < 1:
        raise ConfigurationError(f"RC_THREADS must be positive, got {value}")
    return value


def log_level() -> int:
    """Logging level named by `RC_LOG_LEVEL`."""
    name = str(get_configs("RC_LOG_LEVEL")).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigurationError(f"Unknown RC_LOG_LEVEL '{name}'")
    return level


def load_params(path: Optional[Union[str, Path]],
                overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Read build parameters from a YAML file and apply explicit overrides.

    Parameters
    ----------
    path: str | Path | None
        YAML mapping of parameter names to values. `None` means defaults.
    overrides: dict | None
        Values taking precedence over the file; `None` entries are skipped.

    Returns
    -------
    dict
        Raw parameter mapping, validated later by `BuildParams`.
    """
    params: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                loaded = yaml.safe_load(handle)
        except (OSError, yaml.YAMLError) as error:
            raise ConfigurationError(f"Cannot read parameters from {path}: {error}")
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Parameter file {path} must hold a mapping")
        params.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            params[key] = value
    return params
