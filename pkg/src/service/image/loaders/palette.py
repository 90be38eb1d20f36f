"""
Palette grid loader: one row per line, two-digit color codes separated
by single spaces, ``00`` is background.
"""

from __future__ import annotations

import re

import numpy as np

from src.core.errors import MalformedImage
from src.service.image.grid import PALETTE, PixelGrid
from src.service.image.loaders.base import GridLoader

_ROW_RE = re.compile(r"^\d{2}( \d{2})*$")


class PaletteLoader(GridLoader):
    name = "palette"

    @classmethod
    def sniff(cls, text: str) -> bool:
        rows = [r.strip() for r in text.splitlines() if r.strip()]
        return bool(rows) and all(_ROW_RE.match(r) for r in rows)

    def parse(self, text: str) -> PixelGrid:
        rows = [r.strip() for r in text.splitlines() if r.strip()]
        if not rows:
            raise MalformedImage("empty palette grid")
        parsed: list[list[int]] = []
        for n, row in enumerate(rows, start=1):
            if not _ROW_RE.match(row):
                raise MalformedImage(f"palette row {n}: expected two-digit codes, got {row!r}")
            parsed.append([int(code) for code in row.split(" ")])
        if len({len(r) for r in parsed}) != 1:
            raise MalformedImage("palette rows have different lengths")
        return PixelGrid(np.array(parsed, dtype=np.int32), grayscale=False,
                         palette=dict(PALETTE))
