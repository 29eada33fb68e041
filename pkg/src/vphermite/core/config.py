"""Experiment configuration: TOML parsing, command-line overrides and shipped presets."""

from __future__ import annotations

import copy
import logging
import tomllib
from collections.abc import Iterable
from importlib import resources
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .exceptions import ConfigurationError
from .models import ExperimentConfig

logger = logging.getLogger(__name__)

PRESET_PACKAGE = "vphermite.presets"


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "Invalid configuration:\n  " + "\n  ".join(lines)


def validate_config(raw: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping, reporting errors with dotted key paths."""
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(_format_validation_error(e)) from e


def load_toml(text: str) -> dict[str, Any]:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Malformed configuration text: {e}") from e


def parse_config(text: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Parse TOML experiment text, apply ``key.path=value`` overrides, validate."""
    raw = apply_overrides(load_toml(text), overrides)
    return validate_config(raw)


def parse_override_value(text: str) -> Any:
    """TOML scalar or array; anything else is taken as a bare string."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(raw: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """Return a copy of ``raw`` with each ``a.b.c=value`` assignment applied."""
    patched = copy.deepcopy(raw)
    for override in overrides:
        key, sep, value = override.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"Override must look like key.path=value, got '{override}'")
        parts = key.split(".")
        node = patched
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"Override '{key}': '{part}' is not a section")
            node = child
        node[parts[-1]] = parse_override_value(value.strip())
        logger.debug(f"Override {key} = {node[parts[-1]]!r}")
    return patched


def list_presets() -> list[str]:
    """Names of the experiment presets shipped with the package."""
    root = resources.files(PRESET_PACKAGE)
    return sorted(
        entry.name.removesuffix(".toml")
        for entry in root.iterdir()
        if entry.name.endswith(".toml")
    )


def preset_text(name: str) -> str:
    resource = resources.files(PRESET_PACKAGE).joinpath(f"{name}.toml")
    if not resource.is_file():
        available = ", ".join(list_presets())
        raise ConfigurationError(f"Unknown preset '{name}'. Available presets: {available}")
    return resource.read_text(encoding="utf-8")


def load_preset(name: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    return parse_config(preset_text(name), overrides)


def load_config(
    path: str | Path | None = None,
    preset: str | None = None,
    overrides: Iterable[str] = (),
) -> ExperimentConfig:
    """Resolve a configuration from a file or a preset name, exactly one of them."""
    if (path is None) == (preset is None):
        raise ConfigurationError("Specify exactly one of a configuration file or a preset")
    if preset is not None:
        logger.info(f"Loading preset '{preset}'")
        return load_preset(preset, overrides)
    config_path = Path(path)  # type: ignore[arg-type]
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read configuration file {config_path}: {e}") from e
    logger.info(f"Loading configuration from {config_path}")
    return parse_config(text, overrides)


def preset_description(name: str) -> str:
    raw = load_toml(preset_text(name))
    return str(raw.get("description", ""))
