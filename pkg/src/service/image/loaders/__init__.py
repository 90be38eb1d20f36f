"""Grid loader registry — lazy-loaded, one loader per file format."""

from __future__ import annotations

import importlib
from typing import TYPE_CHECKING

from src.core.errors import UnsupportedFormat

if TYPE_CHECKING:
    from src.service.image.loaders.base import GridLoader

_REGISTRY: dict[str, tuple[str, str]] = {
    "pgm": (
        "src.service.image.loaders.pgm",
        "PgmLoader",
    ),
    "palette": (
        "src.service.image.loaders.palette",
        "PaletteLoader",
    ),
}


def get_grid_loader(name: str) -> type[GridLoader]:
    """Return the GridLoader class for *name*, importing lazily."""
    if name not in _REGISTRY:
        available = ", ".join(sorted(_REGISTRY))
        raise UnsupportedFormat(
            f"Unknown grid format {name!r}. Available: {available}"
        )
    module_path, class_name = _REGISTRY[name]
    module = importlib.import_module(module_path)
    return getattr(module, class_name)


def detect_format(text: str) -> str:
    """Name of the first registered format whose loader recognizes *text*."""
    for name in sorted(_REGISTRY):
        if get_grid_loader(name).sniff(text):
            return name
    head = text.lstrip()[:2]
    raise UnsupportedFormat(f"unrecognized grid format (starts with {head!r})")
