"""
Pixel-grid → shape subnet.

Pixels are visited row-major from the top-left. Each stored pixel becomes
one neuron and is connected to every already-stored pixel in its
8-neighborhood, labeled with the direction from the earlier pixel to the
later one (rows grow downward, so "S" is the next row).
"""

from __future__ import annotations

import logging
import re
from enum import Enum

from src.core.errors import EmptyImage
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef, SubnetRole
from src.mesh.values import TokenValue
from src.service.image.grid import PixelGrid

log = logging.getLogger(__name__)


class Direction(str, Enum):
    E = "E"
    W = "W"
    N = "N"
    S = "S"
    NE = "NE"
    NW = "NW"
    SE = "SE"
    SW = "SW"
    ANY = "ANY"
    INHERIT = "INHERIT"

    @property
    def is_wildcard(self) -> bool:
        return self in (Direction.ANY, Direction.INHERIT)


CONCRETE = frozenset(d for d in Direction if not d.is_wildcard)

# (dcol, drow) from the earlier pixel to the later one
_OFFSETS: dict[tuple[int, int], Direction] = {
    (1, 0): Direction.E,
    (-1, 0): Direction.W,
    (0, -1): Direction.N,
    (0, 1): Direction.S,
    (1, -1): Direction.NE,
    (-1, -1): Direction.NW,
    (1, 1): Direction.SE,
    (-1, 1): Direction.SW,
}

MIRROR = {
    Direction.E: Direction.W, Direction.W: Direction.E,
    Direction.NE: Direction.NW, Direction.NW: Direction.NE,
    Direction.SE: Direction.SW, Direction.SW: Direction.SE,
    Direction.N: Direction.N, Direction.S: Direction.S,
    Direction.ANY: Direction.ANY, Direction.INHERIT: Direction.INHERIT,
}

# neighbors already visited in row-major order
_EARLIER = ((-1, 0), (-1, -1), (0, -1), (1, -1))

_PIXEL_RE = re.compile(r"^px:(\d+),(\d+):(\d+)$")


def direction_between(earlier: tuple[int, int], later: tuple[int, int]) -> Direction:
    return _OFFSETS[(later[0] - earlier[0], later[1] - earlier[1])]


def pixel_token(col: int, row: int, code: int) -> TokenValue:
    return TokenValue(f"px:{col},{row}:{code:02d}")


def parse_pixel_token(value: object) -> tuple[int, int, int] | None:
    """``(col, row, code)`` of a pixel payload, None for other payloads."""
    if not isinstance(value, TokenValue):
        return None
    m = _PIXEL_RE.match(value.token)
    if not m:
        return None
    return int(m.group(1)), int(m.group(2)), int(m.group(3))


def image_to_subnet(
    mesh: Mesh,
    grid: PixelGrid,
    name: str,
    keep_background: bool = False,
    parent: int | None = None,
) -> int:
    """
    Transform a quantized or palette grid into a new shape subnet.

    Background cells are skipped unless *keep_background* is set, in
    which case every cell is stored (alternating patterns such as a
    dotted line).
    """
    if not keep_background and grid.foreground_count == 0:
        raise EmptyImage(f"grid {grid.width}x{grid.height} has no foreground pixels")

    sid = mesh.create_subnet(name, SubnetRole.SHAPE, parent=parent)
    stored: dict[tuple[int, int], int] = {}
    links = 0
    for row in range(grid.height):
        for col in range(grid.width):
            code = int(grid.cells[row, col])
            if code == grid.background and not keep_background:
                continue
            nid, _ = mesh.insert_value(sid, pixel_token(col, row, code))
            for dc, dr in _EARLIER:
                earlier = stored.get((col + dc, row + dr))
                if earlier is None:
                    continue
                label = direction_between((col + dc, row + dr), (col, row))
                mesh.connect([NeuronRef(earlier), NeuronRef(nid)], {label.value}, directed=True)
                links += 1
            stored[(col, row)] = nid

    log.debug("Image %r → subnet %d (%d pixels, %d links)", name, sid, len(stored), links)
    return sid
