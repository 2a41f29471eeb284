"""
config_loader.py — Unified configuration loader
================================================
Merges config.solver.yaml (iteration / matvec / logging defaults) and
config.sweep.yaml (grid and output settings) into a single dict, so the CLI
and scripts can call load_config() and get the combined result.

Precedence: config.sweep.yaml values overwrite config.solver.yaml values on
key collision. CLI flags overwrite both; model defaults apply last.
"""

from pathlib import Path
from typing import Optional, Union

import yaml

from core.errors import ConfigError

CONFIG_FILES = ("config.solver.yaml", "config.sweep.yaml")


def load_config_file(path: Union[Path, str]) -> dict:
    """Load one explicit YAML file (the CLI's --config)."""
    path = Path(path)
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return data


def load_config(root: Optional[Union[Path, str]] = None) -> dict:
    """
    Load and merge config.solver.yaml + config.sweep.yaml.

    Args:
        root: Project root directory. Defaults to the directory containing
              this file (i.e. the project root).

    Returns:
        Merged configuration dict. Missing files are skipped.
    """
    if root is None:
        root = Path(__file__).parent
    root = Path(root)

    merged: dict = {}
    for name in CONFIG_FILES:
        path = root / name
        if path.exists():
            merged.update(load_config_file(path))

    return merged


def section(config: dict, name: str) -> dict:
    value = config.get(name) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section '{name}' must be a mapping")
    return value
