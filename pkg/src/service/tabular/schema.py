"""
Tabular schema: ordered attributes, each with a value kind and a role.

A record is a plain ``dict[str, Value]`` keyed by attribute name.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

from src.core.errors import (
    DuplicateAttribute,
    NoTarget,
    SchemaMismatch,
    UnknownAttribute,
    ValueParseError,
)
from src.mesh.values import Value, is_known_kind, matches_kind, parse_value

Record = dict[str, Value]


class AttributeRole(str, Enum):
    INPUT = "input"
    TARGET = "target"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str                      # int | decN | date-dm | time-hm | cat
    role: AttributeRole = AttributeRole.INPUT

    @property
    def is_target(self) -> bool:
        return self.role is AttributeRole.TARGET

    @property
    def is_categorical(self) -> bool:
        return self.kind == "cat"


@dataclass(frozen=True)
class Schema:
    attributes: tuple[Attribute, ...]

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise DuplicateAttribute(f"attribute {name!r} declared twice")
            seen.add(name)
        for a in self.attributes:
            if not is_known_kind(a.kind):
                raise ValueParseError(f"attribute {a.name!r}: unknown kind {a.kind!r}")
        targets = [a for a in self.attributes if a.is_target]
        if len(targets) != 1:
            raise NoTarget(f"schema needs exactly one target, found {len(targets)}")

    @classmethod
    def of(cls, attributes: Iterable[Attribute]) -> Schema:
        return cls(tuple(attributes))

    @property
    def target(self) -> Attribute:
        return next(a for a in self.attributes if a.is_target)

    @property
    def inputs(self) -> list[Attribute]:
        return [a for a in self.attributes if not a.is_target]

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def kinds(self) -> list[str]:
        return [a.kind for a in self.attributes]

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise UnknownAttribute(f"no attribute {name!r} in schema")

    # ── record checks ────────────────────────────────────────────────

    def check_record(self, record: Mapping[str, Value], complete: bool = True) -> None:
        """
        Complete records carry every attribute; partial ones every input
        and no target. Value kinds must match the declared kinds.
        """
        expected = set(self.names) if complete else {a.name for a in self.inputs}
        got = set(record)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise SchemaMismatch(f"record fields differ from schema: "
                                 f"missing {missing}, unexpected {extra}")
        for name, value in record.items():
            kind = self.attribute(name).kind
            if not matches_kind(value, kind):
                raise SchemaMismatch(f"{name}: {value.text()!r} is not of kind {kind}")

    def parse_record(self, fields: Mapping[str, str], complete: bool = True) -> Record:
        """Parse raw text fields into a record; absent target is allowed when partial."""
        record: Record = {}
        for a in self.attributes:
            if a.is_target and not complete:
                continue
            if a.name not in fields:
                raise SchemaMismatch(f"missing field {a.name!r}")
            record[a.name] = parse_value(a.kind, fields[a.name])
        return record

    # ── annotation form (persisted with the mesh) ────────────────────

    def to_annotation(self) -> list[str]:
        return [f"{a.name}:{a.kind}:{a.role.value}" for a in self.attributes]

    @classmethod
    def from_annotation(cls, lines: Iterable[str]) -> Schema:
        attributes = []
        for line in lines:
            name, kind, role = line.rsplit(":", 2)
            attributes.append(Attribute(name, kind, AttributeRole(role)))
        return cls(tuple(attributes))
