"""
Image engine — labeled shape storage, signature classification and
unit-scale measurement.

Shape subnets of one image domain hang under the super subnet
``images``; their label neurons live in ``labels``. Classification works
on a scratch mesh, so the model mesh is never touched by a query.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any

from src.core.errors import EmptyModel, InvalidRange, NotAShapeSubnet
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef, SubnetRef, SubnetRole
from src.mesh.values import CategoryValue, TokenValue
from src.service.image.grid import PixelGrid, quantize
from src.service.image.transform import (
    CONCRETE,
    Direction,
    image_to_subnet,
    parse_pixel_token,
    pixel_token,
)

log = logging.getLogger(__name__)

SUPER_SUBNET = "images"
LABEL_SUBNET = "labels"
ROUTE_SUPER = "image:super"
ROUTE_LABELS = "image:labels"
LABEL = "label"
UNIT = "unit"

_TENTH = Decimal("0.1")


@dataclass(frozen=True)
class SubnetSignature:
    counts: dict[int, int]
    labels: frozenset[Direction]

    def effective_labels(self) -> frozenset[Direction]:
        """ANY stands for every concrete direction."""
        if Direction.ANY in self.labels:
            return CONCRETE
        return self.labels

    def to_dict(self) -> dict[str, Any]:
        return {
            "counts": {f"{code:02d}": n for code, n in sorted(self.counts.items())},
            "labels": sorted(d.value for d in self.labels),
        }


@dataclass
class ImageEntry:
    shape: int
    label: str
    label_neuron: int
    signature: SubnetSignature


@dataclass
class ImageModel:
    super_subnet: int
    label_subnet: int
    entries: list[ImageEntry] = field(default_factory=list)


@dataclass(frozen=True)
class RankedEntry:
    shape: int
    label: str
    score: tuple[int, int]          # (label mismatch, count distance)


@dataclass
class Classification:
    label: str
    ranked: list[RankedEntry]
    test_signature: SubnetSignature

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "test": self.test_signature.to_dict(),
            "ranked": [
                {"shape": r.shape, "label": r.label, "score": list(r.score)}
                for r in self.ranked
            ],
        }


def subnet_signature(mesh: Mesh, shape: int) -> SubnetSignature:
    """
    Per-color neuron counts and the set of direction labels among the
    subnet's own members. INHERIT takes the first other label found in
    connection order; ANY stays as a wildcard.
    """
    subnet = mesh.subnet(shape)
    if subnet.role is not SubnetRole.SHAPE:
        raise NotAShapeSubnet(f"subnet {subnet.name!r} has role {subnet.role.value}")

    counts: dict[int, int] = {}
    for neuron in mesh.members(shape):
        pixel = parse_pixel_token(neuron.payload)
        if pixel is not None:
            counts[pixel[2]] = counts.get(pixel[2], 0) + 1

    members = set(subnet.neuron_ids)
    seen: set[int] = set()
    found: list[tuple[int, Direction]] = []
    for nid in subnet.neuron_ids:
        for conn in mesh.connections_of(NeuronRef(nid)):
            if conn.id in seen or not set(conn.neuron_ids) <= members:
                continue
            seen.add(conn.id)
            for label in conn.labels:
                if label in Direction.__members__:
                    found.append((conn.id, Direction(label)))
    found.sort(key=lambda x: (x[0], x[1].value))

    labels = {d for _, d in found if d is not Direction.INHERIT}
    if any(d is Direction.INHERIT for _, d in found):
        inherited = next((d for _, d in found if d is not Direction.INHERIT), None)
        if inherited is not None:
            labels.add(inherited)
    return SubnetSignature(counts, frozenset(labels))


def score(entry: SubnetSignature, test: SubnetSignature) -> tuple[int, int]:
    mismatch = len(entry.effective_labels() ^ test.labels)
    codes = set(entry.counts) | set(test.counts)
    count_distance = sum(abs(entry.counts.get(c, 0) - test.counts.get(c, 0)) for c in codes)
    return mismatch, count_distance


class ImageEngine:
    """
    Stores labeled images and classifies new ones.

    Responsibilities:
      - Quantize grayscale input at the configured threshold
      - Keep shape subnets under the super subnet with their label neurons
      - Score a test grid against every stored signature
      - Shape priors: measurement units and direction-free lines
    """

    def __init__(self, mesh: Mesh, threshold: int | None = None) -> None:
        self.mesh = mesh
        self.threshold = mesh.config.image_threshold if threshold is None else threshold

    def prepare(self, grid: PixelGrid) -> PixelGrid:
        return quantize(grid, self.threshold)

    # ── model ────────────────────────────────────────────────────────

    def _get_or_create(self, name: str, role: SubnetRole, route: str) -> int:
        mesh = self.mesh
        if mesh.has_route(route):
            return mesh.route_table[route]
        sid = mesh.create_subnet(name, role)
        mesh.register_route(route, sid)
        return sid

    def model(self) -> ImageModel:
        """The image model stored in the mesh, created on first use."""
        model = ImageModel(
            super_subnet=self._get_or_create(SUPER_SUBNET, SubnetRole.SUPER, ROUTE_SUPER),
            label_subnet=self._get_or_create(LABEL_SUBNET, SubnetRole.LABEL, ROUTE_LABELS),
        )
        mesh = self.mesh
        for sid in sorted(mesh.subnets):
            if mesh.subnets[sid].parent != model.super_subnet:
                continue
            for conn in mesh.connections_of(SubnetRef(sid)):
                if LABEL not in conn.labels or not conn.neuron_ids:
                    continue
                label_neuron = conn.neuron_ids[0]
                model.entries.append(ImageEntry(
                    shape=sid,
                    label=mesh.value(label_neuron).text(),
                    label_neuron=label_neuron,
                    signature=subnet_signature(mesh, sid),
                ))
                break
        return model

    def register_labeled_image(
        self,
        model: ImageModel,
        grid: PixelGrid,
        label: str,
        keep_background: bool = False,
    ) -> int:
        mesh = self.mesh
        label_value = CategoryValue(label)
        name = f"shape-{mesh.next_ids['subnet']}"
        sid = image_to_subnet(mesh, self.prepare(grid), name,
                              keep_background=keep_background, parent=model.super_subnet)
        label_neuron, _ = mesh.insert_value(model.label_subnet, label_value)
        mesh.connect([NeuronRef(label_neuron), SubnetRef(sid)], {LABEL})

        signature = subnet_signature(mesh, sid)
        model.entries.append(ImageEntry(sid, label, label_neuron, signature))
        log.info("Image %r stored as subnet %d (%s)", label, sid, signature.to_dict())
        return sid

    # ── classification ───────────────────────────────────────────────

    def classify(
        self,
        model: ImageModel,
        grid: PixelGrid,
        keep_background: bool = False,
    ) -> Classification:
        """Rank stored entries by (label mismatch, count distance); lowest wins."""
        if not model.entries:
            raise EmptyModel("no labeled images stored")
        scratch = Mesh(self.mesh.config)
        test_sid = image_to_subnet(scratch, self.prepare(grid), "test",
                                   keep_background=keep_background)
        test = subnet_signature(scratch, test_sid)

        ranked = sorted(
            (RankedEntry(e.shape, e.label, score(e.signature, test)) for e in model.entries),
            key=lambda r: (r.score, r.shape),
        )
        log.debug("Classified as %r (score %s)", ranked[0].label, ranked[0].score)
        return Classification(ranked[0].label, ranked, test)

    # ── shape priors ─────────────────────────────────────────────────

    def _chain(self, name: str, length: int, first: Direction, rest: Direction) -> int:
        if length < 1:
            raise InvalidRange(f"pixel chain needs >= 1 pixel, got {length}")
        mesh = self.mesh
        if mesh.has_subnet_named(name):
            sid = mesh.subnet_by_name(name).id
        else:
            sid = mesh.create_subnet(name, SubnetRole.SHAPE)
        ids = [mesh.insert_value(sid, pixel_token(0, i, 1))[0] for i in range(length)]
        for i in range(1, length):
            label = first if i == 1 else rest
            mesh.connect([NeuronRef(ids[i - 1]), NeuronRef(ids[i])], {label.value}, directed=True)
        return sid

    def build_unit_subnet(self, unit_name: str, pixels_per_unit: int) -> int:
        """A unit of measure: *pixels_per_unit* pixels in a row, any direction."""
        sid = self._chain(f"unit:{unit_name}", pixels_per_unit, Direction.ANY, Direction.ANY)
        labels = self._get_or_create(LABEL_SUBNET, SubnetRole.LABEL, ROUTE_LABELS)
        token, _ = self.mesh.insert_value(labels, TokenValue(unit_name))
        self.mesh.connect([NeuronRef(token), SubnetRef(sid)], {UNIT})
        self.mesh.register_route(f"unit:{unit_name}", sid)
        return sid

    def build_line_prior(self, name: str, length: int) -> int:
        """A line in any direction: first link ANY, every later link INHERIT."""
        return self._chain(name, length, Direction.ANY, Direction.INHERIT)

    def measure_extent(self, shape: int, unit: int) -> Decimal:
        """Longer bounding-box side of *shape* in units, to one decimal place."""
        mesh = self.mesh
        for sid in (shape, unit):
            if mesh.subnet(sid).role is not SubnetRole.SHAPE:
                raise NotAShapeSubnet(f"subnet {mesh.subnets[sid].name!r} is not a shape")

        pixels = [p for p in (parse_pixel_token(n.payload) for n in mesh.members(shape))
                  if p is not None]
        unit_length = sum(1 for n in mesh.members(unit) if parse_pixel_token(n.payload))
        if not pixels or not unit_length:
            raise NotAShapeSubnet("measurement needs pixel members in both subnets")

        cols = [p[0] for p in pixels]
        rows = [p[1] for p in pixels]
        extent = max(max(cols) - min(cols) + 1, max(rows) - min(rows) + 1)
        return (Decimal(extent) / Decimal(unit_length)).quantize(_TENTH, rounding=ROUND_HALF_UP)
