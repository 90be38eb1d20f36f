"""Plain (ASCII, ``P2``) PGM grayscale loader."""

from __future__ import annotations

import numpy as np

from src.core.errors import MalformedImage, UnsupportedFormat
from src.service.image.grid import PixelGrid
from src.service.image.loaders.base import GridLoader


def _tokens(text: str) -> list[str]:
    out: list[str] = []
    for line in text.splitlines():
        out.extend(line.split("#", 1)[0].split())
    return out


class PgmLoader(GridLoader):
    name = "pgm"

    @classmethod
    def sniff(cls, text: str) -> bool:
        return text.lstrip().startswith("P2")

    def parse(self, text: str) -> PixelGrid:
        tokens = _tokens(text)
        if not tokens:
            raise MalformedImage("empty PGM file")
        if tokens[0] != "P2":
            raise UnsupportedFormat(f"only ASCII PGM (P2) is supported, got {tokens[0]!r}")
        try:
            width, height, maxval = (int(t) for t in tokens[1:4])
            values = [int(t) for t in tokens[4:]]
        except ValueError as e:
            raise MalformedImage(f"non-numeric PGM token: {e}") from e

        if width < 1 or height < 1 or not 0 < maxval <= 255:
            raise MalformedImage(f"bad PGM header {width}x{height} maxval {maxval}")
        if len(values) != width * height:
            raise MalformedImage(
                f"PGM declares {width}x{height} = {width * height} cells, found {len(values)}"
            )
        cells = np.array(values, dtype=np.int32).reshape(height, width)
        if (cells < 0).any() or (cells > maxval).any():
            raise MalformedImage(f"PGM value outside 0..{maxval}")
        if maxval != 255:
            cells = cells * 255 // maxval
        return PixelGrid(cells, grayscale=True)
