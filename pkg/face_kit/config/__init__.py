"""Configuration: run settings, per-head constants and alignment templates."""

from face_kit.config.defaults import HEAD_DEFAULTS
from face_kit.config.settings import DEFAULTS_PATH, RunConfig, flatten, load_defaults
from face_kit.config.templates import TEMPLATE_112, TEMPLATE_SIZE

__all__ = [
    "RunConfig",
    "DEFAULTS_PATH",
    "flatten",
    "load_defaults",
    "HEAD_DEFAULTS",
    "TEMPLATE_112",
    "TEMPLATE_SIZE",
]
