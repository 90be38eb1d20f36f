"""Abstract base class for grid loaders."""

from __future__ import annotations

from abc import ABC, abstractmethod

from src.service.image.grid import PixelGrid


class GridLoader(ABC):
    """
    Base class for grid loaders.

    Loaders only parse text into a ``PixelGrid``. Quantization and the
    pixel-to-subnet transform are handled by the engine.
    """

    name: str = ""

    @abstractmethod
    def parse(self, text: str) -> PixelGrid:
        """Parse a whole file's text; raise ``MalformedImage`` on bad input."""
        ...

    @classmethod
    def sniff(cls, text: str) -> bool:
        """True when *text* looks like this loader's format."""
        return False
