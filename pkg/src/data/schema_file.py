"""
Schema files: one ``name:kind:role`` line per attribute, in column order.

Blank lines and ``#`` comments are ignored. ``kind`` is one of ``int``,
``decN`` (N decimal places), ``date-dm``, ``time-hm``, ``cat``; ``role``
is ``input`` or ``target``.
"""

from __future__ import annotations

from pathlib import Path

from src.core.errors import ValueParseError
from src.mesh.values import is_known_kind
from src.service.tabular.schema import Attribute, AttributeRole, Schema


def parse_schema_text(text: str) -> Schema:
    attributes: list[Attribute] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(":")]
        if len(parts) != 3 or not all(parts):
            raise ValueParseError(f"schema line {n}: expected name:kind:role, got {raw.strip()!r}")
        name, kind, role = parts
        if not is_known_kind(kind):
            raise ValueParseError(f"schema line {n}: unknown kind {kind!r}")
        try:
            attributes.append(Attribute(name, kind, AttributeRole(role)))
        except ValueError:
            raise ValueParseError(f"schema line {n}: role must be input or target, got {role!r}") from None
    return Schema(tuple(attributes))


def load_schema(path: Path | str) -> Schema:
    return parse_schema_text(Path(path).read_text(encoding="utf-8"))
