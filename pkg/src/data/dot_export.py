"""
Graphviz DOT export of a mesh or a subset of its subnets.

One cluster per subnet, node label = value text, edge label = connection
labels plus weight. Undirected connections are drawn without arrowheads.
Only connections whose endpoints all fall inside the scope are drawn.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from pathlib import Path

from src.mesh.mesh import Mesh
from src.mesh.model import EndpointRef, SubnetRef

log = logging.getLogger(__name__)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _resolve_scope(mesh: Mesh, scope: Iterable[int | str] | None) -> list[int]:
    if scope is None:
        return sorted(mesh.subnets)
    ids = []
    for item in scope:
        sid = mesh.subnet_by_name(item).id if isinstance(item, str) else mesh.subnet(item).id
        ids.append(sid)
    return sorted(set(ids))


def dot_text(mesh: Mesh, scope: Iterable[int | str] | None = None) -> str:
    subnets = _resolve_scope(mesh, scope)
    in_scope = set(subnets)
    lines = ["digraph mesh {", "  compound=true;", "  node [shape=ellipse];"]

    placed: set[int] = set()
    for sid in subnets:
        subnet = mesh.subnets[sid]
        lines.append(f"  subgraph cluster_s{sid} {{")
        lines.append(f"    label={_quote(f'{subnet.name} ({subnet.role.value})')};")
        lines.append(f"    s{sid} [shape=box, label={_quote(subnet.name)}];")
        for nid in subnet.neuron_ids:
            if nid in placed:
                continue
            placed.add(nid)
            lines.append(f"    n{nid} [label={_quote(mesh.value(nid).text())}];")
        lines.append("  }")

    def visible(ref: EndpointRef) -> bool:
        if isinstance(ref, SubnetRef):
            return ref.id in in_scope
        return ref.id in placed

    for cid in sorted(mesh.connections):
        conn = mesh.connections[cid]
        if not all(visible(r) for r in conn.endpoints):
            continue
        label = _quote(f"{conn.label_text()} ({conn.weight})")
        style = "" if conn.directed else ", dir=none"
        head, *rest = conn.endpoints
        for other in rest:
            lines.append(f"  {head} -> {other} [label={label}{style}];")

    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(mesh: Mesh, path: Path | str, scope: Iterable[int | str] | None = None) -> None:
    text = dot_text(mesh, scope)
    Path(path).write_text(text, encoding="utf-8")
    log.info("DOT graph written to %s", path)
