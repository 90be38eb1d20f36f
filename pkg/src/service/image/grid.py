"""
Pixel grids and grayscale quantization.

Cells are a ``(height, width)`` numpy array in row-major order. Grayscale
grids keep raw 0..255 values until ``quantize`` maps them to two codes:
1 (black, foreground) and 0 (white, background).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.errors import MalformedImage

BACKGROUND = 0
FOREGROUND = 1

BLACK_WHITE = {0: "white", 1: "black"}
PALETTE = {0: "white", 1: "red", 2: "green", 3: "blue", 4: "yellow"}


@dataclass
class PixelGrid:
    cells: np.ndarray
    grayscale: bool = False
    background: int = BACKGROUND
    palette: dict[int, str] = field(default_factory=lambda: dict(PALETTE))

    def __post_init__(self) -> None:
        self.cells = np.asarray(self.cells, dtype=np.int32)
        if self.cells.ndim != 2 or 0 in self.cells.shape:
            raise MalformedImage(f"grid must be a non-empty 2-D array, got shape {self.cells.shape}")
        if (self.cells < 0).any():
            raise MalformedImage("negative cell value")

    @property
    def width(self) -> int:
        return int(self.cells.shape[1])

    @property
    def height(self) -> int:
        return int(self.cells.shape[0])

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.cells != self.background))

    def color_name(self, code: int) -> str:
        return self.palette.get(code, f"{code:02d}")

    def mirrored(self) -> PixelGrid:
        """Left-right mirror image."""
        return PixelGrid(np.fliplr(self.cells).copy(), self.grayscale,
                         self.background, dict(self.palette))


def quantize(grid: PixelGrid, threshold: int = 128) -> PixelGrid:
    """Grayscale cell < threshold → black (1), else white (0); palette grids pass through."""
    if not grid.grayscale:
        return grid
    cells = np.where(grid.cells < threshold, FOREGROUND, BACKGROUND).astype(np.int32)
    return PixelGrid(cells, grayscale=False, background=BACKGROUND, palette=dict(BLACK_WHITE))


def load_grid(source: str | Path, fmt: str | None = None) -> PixelGrid:
    """Read a grid file, detecting its format from the content unless *fmt* is given."""
    from src.service.image.loaders import detect_format, get_grid_loader

    text = Path(source).read_text(encoding="utf-8")
    loader_cls = get_grid_loader(fmt or detect_format(text))
    return loader_cls().parse(text)
