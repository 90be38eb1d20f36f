"""
JSON archive for persisting a whole mesh.

Everything needed to resume is stored: subnets, neurons, connections with
weights and occurrences, the route table, annotations (the tabular
schema), id counters and the engine config. Scratch buffers are not.
Connection kinds and home subnets are derived again on load.
"""

from __future__ import annotations

import json
import logging
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, TypedDict

from src.core.config import EngineConfig
from src.core.errors import (
    ArchiveVersionMismatch,
    ConfigError,
    CorruptArchive,
    IntegrityError,
    ValueParseError,
)
from src.mesh.mesh import Mesh
from src.mesh.model import Connection, ConnectionKind, Neuron, NeuronRef, Subnet, SubnetRef, SubnetRole
from src.mesh.values import value_from_dict, value_to_dict

log = logging.getLogger(__name__)

ARCHIVE_VERSION = "meshnet/1"


class SubnetRecord(TypedDict):
    id: int
    name: str
    role: str
    parent: int | None
    neurons: list[int]


class ConnectionRecord(TypedDict):
    id: int
    endpoints: list[str]
    labels: list[str]
    weight: str
    occurrences: int
    directed: bool


def _ref_text(ref: NeuronRef | SubnetRef) -> str:
    return str(ref)


def _ref_parse(text: str) -> NeuronRef | SubnetRef:
    kind, ident = text[:1], text[1:]
    if kind == "n":
        return NeuronRef(int(ident))
    if kind == "s":
        return SubnetRef(int(ident))
    raise ValueError(f"bad endpoint {text!r}")


def mesh_to_dict(mesh: Mesh) -> dict[str, Any]:
    return {
        "version": ARCHIVE_VERSION,
        "config": mesh.config.to_dict(),
        "next_ids": dict(mesh.next_ids),
        "subnets": [
            SubnetRecord(id=s.id, name=s.name, role=s.role.value,
                         parent=s.parent, neurons=list(s.neuron_ids))
            for s in (mesh.subnets[i] for i in sorted(mesh.subnets))
        ],
        "neurons": [
            {"id": n.id, "payload": value_to_dict(n.payload)}
            for n in (mesh.neurons[i] for i in sorted(mesh.neurons))
        ],
        "connections": [
            ConnectionRecord(id=c.id, endpoints=[_ref_text(r) for r in c.endpoints],
                             labels=sorted(c.labels), weight=str(c.weight),
                             occurrences=c.occurrences, directed=c.directed)
            for c in (mesh.connections[i] for i in sorted(mesh.connections))
        ],
        "routes": dict(sorted(mesh.route_table.items())),
        "annotations": mesh.annotations,
    }


def mesh_from_dict(data: dict[str, Any]) -> Mesh:
    version = data.get("version") if isinstance(data, dict) else None
    if version != ARCHIVE_VERSION:
        raise ArchiveVersionMismatch(
            f"archive version {version!r}, expected {ARCHIVE_VERSION!r}"
        )
    try:
        mesh = Mesh(EngineConfig.from_dict(data["config"]))
        mesh.next_ids = {k: int(v) for k, v in data["next_ids"].items()}

        for raw in data["neurons"]:
            nid = int(raw["id"])
            mesh.neurons[nid] = Neuron(id=nid, payload=value_from_dict(raw["payload"]))
        for raw in data["subnets"]:
            sid = int(raw["id"])
            mesh.subnets[sid] = Subnet(id=sid, name=raw["name"], role=SubnetRole(raw["role"]),
                                       neuron_ids=[int(n) for n in raw["neurons"]],
                                       parent=raw["parent"])
            for nid in mesh.subnets[sid].neuron_ids:
                mesh.neurons[nid].home_subnets.add(sid)
        for raw in data["connections"]:
            cid = int(raw["id"])
            mesh.connections[cid] = Connection(
                id=cid,
                endpoints=tuple(_ref_parse(e) for e in raw["endpoints"]),
                labels=frozenset(raw["labels"]),
                weight=Decimal(raw["weight"]),
                occurrences=int(raw["occurrences"]),
                kind=ConnectionKind.NEURON_NEURON_SAME_SUBNET,   # derived below
                directed=bool(raw["directed"]),
            )
        mesh.route_table = {str(k): int(v) for k, v in data["routes"].items()}
        mesh.annotations = dict(data.get("annotations") or {})
        mesh.rebuild_indexes()
        mesh.check_integrity()
    except (KeyError, TypeError, ValueError, InvalidOperation,
            ValueParseError, ConfigError, IntegrityError) as e:
        raise CorruptArchive(f"archive content is invalid: {e}") from e
    return mesh


class MeshArchive:
    """Reads and writes mesh archives on disk."""

    def __init__(self, path: Path | str) -> None:
        self._path = Path(path)

    @property
    def path(self) -> Path:
        return self._path

    def save(self, mesh: Mesh) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(mesh_to_dict(mesh), sort_keys=True, indent=1, ensure_ascii=False)
        self._path.write_text(text + "\n", encoding="utf-8")
        log.info("Mesh saved to %s (%s)", self._path, mesh.stats())

    def load(self) -> Mesh:
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise CorruptArchive(f"{self._path}: not valid JSON ({e})") from e
        mesh = mesh_from_dict(data)
        log.info("Mesh loaded from %s (%s)", self._path, mesh.stats())
        return mesh


def save_mesh(mesh: Mesh, path: Path | str) -> None:
    MeshArchive(path).save(mesh)


def load_mesh(path: Path | str) -> Mesh:
    return MeshArchive(path).load()
