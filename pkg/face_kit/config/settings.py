"""Run configuration: packaged defaults, a JSON file, then command-line overrides."""

import json
import logging
from pathlib import Path
from typing import Any

from face_kit.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).with_name("config.json")


def flatten(tree: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """{"head": {"kind": "ArcFace"}} -> {"head.kind": "ArcFace"}; dotted keys pass through."""
    flat = {}
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def load_defaults() -> dict[str, Any]:
    with DEFAULTS_PATH.open(encoding="utf-8") as f:
        return flatten(json.load(f))


def _coerce(key: str, value: Any, default: Any) -> Any:
    if default is None:
        if value is None or (isinstance(value, (int, float)) and not isinstance(value, bool)):
            return None if value is None else float(value)
    elif isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif isinstance(default, str):
        if isinstance(value, str):
            return value
    elif isinstance(default, list):
        if isinstance(value, list):
            return list(value)
    expected = "number or null" if default is None else type(default).__name__
    raise ConfigError(f"config key {key!r} expects {expected}, got {value!r}")


class RunConfig:
    """
    Flat namespaced settings, e.g. cfg["head.kind"].

    Precedence: packaged defaults < JSON file < explicit overrides. Keys not in
    the defaults are rejected.

    Example:
        >>> cfg = RunConfig.load(overrides={"head.kind": "CosFace"})
        >>> cfg["head.kind"], cfg["eval.folds"]
        ('CosFace', 10)
    """

    def __init__(self, values: dict[str, Any]):
        self._values = values

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> "RunConfig":
        defaults = load_defaults()
        values = dict(defaults)
        layers = []
        if path:
            try:
                with Path(path).open(encoding="utf-8") as f:
                    layers.append((str(path), flatten(json.load(f))))
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON ({e})") from e
            except OSError as e:
                raise ConfigError(f"{path}: cannot read config ({e})") from e
        if overrides:
            layers.append(("command line", {k: v for k, v in overrides.items() if v is not None}))
        for source, layer in layers:
            for key, value in layer.items():
                if key not in defaults:
                    raise ConfigError(f"unknown config key {key!r} (from {source})")
                values[key] = _coerce(key, value, defaults[key])
        logger.debug("run config: %s", values)
        return cls(values)

    def __getitem__(self, key: str) -> Any:
        if key not in self._values:
            raise ConfigError(f"unknown config key {key!r}")
        return self._values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self._values.get(key, default)

    def keys(self) -> list[str]:
        return list(self._values)

    def as_dict(self) -> dict[str, Any]:
        return dict(self._values)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self._values, indent=2, sort_keys=True) + "\n", encoding="utf-8")
