"""
Settings loading from the default or an alternative YAML file.
"""

import logging
from pathlib import Path

import yaml

from .settings_model import AppSettings

logger = logging.getLogger(__name__)


def load_settings(config_path: str | Path | None = None) -> AppSettings:
    """
    Load application settings.

    Without a path, pydantic-settings reads 'settings/config.yaml' (when present)
    and the BALLALIGN_* environment. With a path, that file's content is passed as
    init values, which take precedence over every other source.

    Args:
        config_path: Optional path to an alternative YAML configuration file

    Returns:
        Validated AppSettings

    Raises:
        FileNotFoundError: If config_path is given but does not exist
        ValueError: If the YAML document is not a mapping
    """
    if config_path is None:
        logger.debug("Loading settings from default sources")
        return AppSettings()

    path = Path(config_path)
    if not path.exists():
        logger.error(f"Configuration file not found: {path}")
        raise FileNotFoundError(f"Configuration file not found: {path}")

    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    if not isinstance(data, dict):
        logger.error(f"Invalid configuration file format: {path}")
        raise ValueError(f"Invalid configuration file format: {path}")

    logger.info(f"Loading settings from {path}")
    return AppSettings(**data)
