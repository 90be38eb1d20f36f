"""
The mesh of subnets and its central mechanism.

``Mesh`` owns every neuron, subnet and connection, allocates ids, keeps
subnets free of duplicate values and applies the weight law on repeated
observations. The central mechanism is realised as:

  - ``route_table``: attribute / value-kind → owning subnet
  - subnets with role ``central``
  - ``scratch``: transient input/output buffers and a routing trace

Adjacency is indexed in a ``networkx.Graph`` over endpoint refs: two
endpoints are adjacent when they share at least one connection, and the
edge keeps the ids of those connections. Traversal ignores direction.

Threading: single writer, many readers. Mutating calls need exclusive
access; ``neighbors``, ``targets_of``, ``route`` and ``bond`` only read
(``route`` appends to a thread-safe deque).
"""

from __future__ import annotations

import copy
import logging
from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any

import networkx as nx

from src.core.config import EngineConfig
from src.core.errors import (
    ArityTooSmall,
    DuplicateSubnetName,
    IntegrityError,
    NotATargetSubnet,
    StructureError,
    UnknownConnection,
    UnknownEndpoint,
    UnknownNeuron,
    UnknownSubnet,
    UnroutableInput,
)
from src.mesh.model import (
    Connection,
    ConnectionKey,
    ConnectionKind,
    EndpointRef,
    Neuron,
    NeuronRef,
    Subnet,
    SubnetRef,
    SubnetRole,
)
from src.mesh.values import Value

log = logging.getLogger(__name__)

_TRACE_LIMIT = 512


@dataclass
class CentralScratch:
    """Transient buffers of the central mechanism; never persisted."""
    routed: deque[tuple[str, int]] = field(
        default_factory=lambda: deque(maxlen=_TRACE_LIMIT)
    )
    inputs: dict[str, Value] = field(default_factory=dict)
    outputs: dict[str, Value] = field(default_factory=dict)

    def clear(self) -> None:
        self.routed.clear()
        self.inputs.clear()
        self.outputs.clear()


class Mesh:
    """The whole graph plus the central mechanism's routing state."""

    def __init__(self, config: EngineConfig | None = None) -> None:
        self.config = config or EngineConfig()
        self.subnets: dict[int, Subnet] = {}
        self.neurons: dict[int, Neuron] = {}
        self.connections: dict[int, Connection] = {}
        self.route_table: dict[str, int] = {}
        self.annotations: dict[str, Any] = {}
        self.scratch = CentralScratch()
        self.next_ids: dict[str, int] = {"subnet": 1, "neuron": 1, "connection": 1}

        self._names: dict[str, int] = {}
        self._by_key: dict[ConnectionKey, int] = {}
        self._graph = nx.Graph()

    def _allocate(self, what: str) -> int:
        ident = self.next_ids[what]
        self.next_ids[what] = ident + 1
        return ident

    def clone(self) -> Mesh:
        """Independent deep copy with empty scratch buffers."""
        other = copy.deepcopy(self)
        other.scratch = CentralScratch()
        return other

    # ── lookups ──────────────────────────────────────────────────────

    def subnet(self, sid: int) -> Subnet:
        try:
            return self.subnets[sid]
        except KeyError:
            raise UnknownSubnet(f"no subnet {sid}") from None

    def neuron(self, nid: int) -> Neuron:
        try:
            return self.neurons[nid]
        except KeyError:
            raise UnknownNeuron(f"no neuron {nid}") from None

    def connection(self, cid: int) -> Connection:
        try:
            return self.connections[cid]
        except KeyError:
            raise UnknownConnection(f"no connection {cid}") from None

    def subnet_by_name(self, name: str) -> Subnet:
        try:
            return self.subnets[self._names[name]]
        except KeyError:
            raise UnknownSubnet(f"no subnet named {name!r}") from None

    def has_subnet_named(self, name: str) -> bool:
        return name in self._names

    def members(self, sid: int) -> list[Neuron]:
        return [self.neurons[n] for n in self.subnet(sid).neuron_ids]

    def find_neuron(self, sid: int, value: Value) -> int | None:
        return self.subnet(sid).by_value.get(value)

    def value(self, nid: int) -> Value:
        return self.neuron(nid).payload

    def _resolves(self, ref: EndpointRef) -> bool:
        if isinstance(ref, NeuronRef):
            return ref.id in self.neurons
        if isinstance(ref, SubnetRef):
            return ref.id in self.subnets
        return False

    # ── structure ────────────────────────────────────────────────────

    def create_subnet(
        self,
        name: str,
        role: SubnetRole | str,
        parent: int | None = None,
    ) -> int:
        """Register an empty subnet and return its ordinal id."""
        if name in self._names:
            raise DuplicateSubnetName(f"subnet name {name!r} already used")
        if parent is not None:
            self.subnet(parent)
        sid = self._allocate("subnet")
        self.subnets[sid] = Subnet(id=sid, name=name, role=SubnetRole(role), parent=parent)
        self._names[name] = sid
        log.debug("Subnet %d %r created (%s)", sid, name, SubnetRole(role).value)
        return sid

    def insert_value(self, sid: int, value: Value) -> tuple[int, bool]:
        """
        Store *value* in subnet *sid* without duplicating it.

        Returns ``(neuron_id, created)``; an existing neuron with an
        equal payload is returned with ``created=False``.
        """
        subnet = self.subnet(sid)
        existing = subnet.by_value.get(value)
        if existing is not None:
            return existing, False

        nid = self._allocate("neuron")
        self.neurons[nid] = Neuron(id=nid, payload=value, home_subnets={sid})
        subnet.neuron_ids.append(nid)
        subnet.by_value[value] = nid
        log.debug("Neuron %d = %s in subnet %r", nid, value.text(), subnet.name)
        return nid, True

    def add_member(self, sid: int, nid: int) -> None:
        """Make an existing neuron a member of another subnet as well."""
        subnet = self.subnet(sid)
        neuron = self.neuron(nid)
        if nid in subnet.neuron_ids:
            return
        if neuron.payload in subnet.by_value:
            raise StructureError(
                f"subnet {subnet.name!r} already holds {neuron.payload.text()}"
            )
        subnet.neuron_ids.append(nid)
        subnet.by_value[neuron.payload] = nid
        neuron.home_subnets.add(sid)

    # ── connections ──────────────────────────────────────────────────

    def weight_for(self, occurrences: int) -> Decimal:
        """Weight law: initial − decrement·(n − 1), clamped at the floor."""
        cfg = self.config
        return max(cfg.weight_floor,
                   cfg.weight_initial - cfg.weight_decrement * (occurrences - 1))

    def connect(
        self,
        endpoints: Iterable[EndpointRef],
        labels: Iterable[str] = (),
        directed: bool = False,
    ) -> int:
        """
        Connect two or more endpoints.

        A connection is identified by its unordered endpoint set plus its
        label set; observing an existing one bumps its occurrences instead
        of adding a parallel edge.
        """
        refs = tuple(endpoints)
        for ref in refs:
            if not self._resolves(ref):
                raise UnknownEndpoint(f"endpoint {ref} does not resolve")
        if len(refs) < 2:
            raise ArityTooSmall(f"connection needs >= 2 endpoints, got {len(refs)}")
        if len(set(refs)) != len(refs):
            raise ArityTooSmall(f"duplicate endpoint in {[str(r) for r in refs]}")

        label_set = frozenset(labels)
        key = (frozenset(refs), label_set)
        existing = self._by_key.get(key)
        if existing is not None:
            self.record_occurrence(existing)
            return existing

        cid = self._allocate("connection")
        conn = Connection(
            id=cid,
            endpoints=refs,
            labels=label_set,
            weight=self.config.weight_initial,
            occurrences=1,
            kind=self._derive_kind(refs),
            directed=directed,
        )
        self.connections[cid] = conn
        self._index(conn)
        return cid

    def record_occurrence(self, cid: int) -> Decimal:
        """Count one more observation of a connection and reapply the weight law."""
        conn = self.connection(cid)
        conn.occurrences += 1
        conn.weight = self.weight_for(conn.occurrences)
        return conn.weight

    def connection_between(
        self, endpoints: Iterable[EndpointRef], labels: Iterable[str] = ()
    ) -> Connection | None:
        cid = self._by_key.get((frozenset(endpoints), frozenset(labels)))
        return self.connections[cid] if cid is not None else None

    def connections_of(self, ref: EndpointRef) -> list[Connection]:
        """Every connection with *ref* among its endpoints, by id."""
        if ref not in self._graph:
            return []
        ids: set[int] = set()
        for _, _, data in self._graph.edges(ref, data=True):
            ids |= data["connections"]
        return [self.connections[c] for c in sorted(ids)]

    def bond(self, a: int, b: int) -> Connection | None:
        """
        Strongest connection joining neurons *a* and *b*.

        Minimum weight wins, then maximum occurrences, then lowest id.
        """
        data = self._graph.get_edge_data(NeuronRef(a), NeuronRef(b))
        if not data:
            return None
        conns = [self.connections[c] for c in data["connections"]]
        return min(conns, key=lambda c: (c.weight, -c.occurrences, c.id))

    def _index(self, conn: Connection) -> None:
        self._by_key[conn.key] = conn.id
        refs = conn.endpoints
        for i, u in enumerate(refs):
            for v in refs[i + 1:]:
                if self._graph.has_edge(u, v):
                    self._graph[u][v]["connections"].add(conn.id)
                else:
                    self._graph.add_edge(u, v, connections={conn.id})

    def rebuild_indexes(self) -> None:
        """Rebuild key index, adjacency graph and subnet value maps."""
        self._by_key.clear()
        self._graph = nx.Graph()
        for cid in sorted(self.connections):
            conn = self.connections[cid]
            conn.kind = self._derive_kind(conn.endpoints)
            self._index(conn)
        self._names = {s.name: sid for sid, s in self.subnets.items()}
        for subnet in self.subnets.values():
            subnet.by_value = {self.neurons[n].payload: n for n in subnet.neuron_ids}

    # ── classification ───────────────────────────────────────────────

    def _is_central(self, ref: EndpointRef) -> bool:
        if isinstance(ref, SubnetRef):
            return self.subnets[ref.id].role is SubnetRole.CENTRAL
        return any(
            self.subnets[s].role is SubnetRole.CENTRAL
            for s in self.neurons[ref.id].home_subnets
        )

    def _derive_kind(self, refs: tuple[EndpointRef, ...]) -> ConnectionKind:
        neuron_refs = [r for r in refs if isinstance(r, NeuronRef)]
        subnet_refs = [r for r in refs if isinstance(r, SubnetRef)]
        central = any(self._is_central(r) for r in refs)

        if not subnet_refs:
            if central:
                return ConnectionKind.NEURON_NEURON_CENTRAL
            homes = [self.neurons[r.id].home_subnets for r in neuron_refs]
            if set.intersection(*homes):
                return ConnectionKind.NEURON_NEURON_SAME_SUBNET
            return ConnectionKind.NEURON_NEURON_CROSS_SUBNET
        if not neuron_refs:
            return (ConnectionKind.SUBNET_SUBNET_CENTRAL if central
                    else ConnectionKind.SUBNET_SUBNET)
        return (ConnectionKind.NEURON_SUBNET_CENTRAL if central
                else ConnectionKind.NEURON_SUBNET)

    def classify_connection(self, cid: int) -> ConnectionKind:
        """Connection kind derived from endpoint types and central roles."""
        return self._derive_kind(self.connection(cid).endpoints)

    # ── traversal ────────────────────────────────────────────────────

    def neighbors(self, nid: int, subnet_filter: int | None = None) -> list[int]:
        """
        Neurons sharing at least one connection with *nid*, sorted by id,
        optionally restricted to members of *subnet_filter*.
        """
        self.neuron(nid)
        if subnet_filter is not None:
            self.subnet(subnet_filter)
        node = NeuronRef(nid)
        if node not in self._graph:
            return []
        return sorted(
            other.id
            for other in self._graph.neighbors(node)
            if isinstance(other, NeuronRef)
            and (subnet_filter is None
                 or subnet_filter in self.neurons[other.id].home_subnets)
        )

    def targets_of(self, nid: int, target: int) -> set[int]:
        """Neighbors of *nid* that live in target subnet *target*."""
        if self.subnet(target).role is not SubnetRole.TARGET:
            raise NotATargetSubnet(f"subnet {self.subnets[target].name!r} is not a target")
        return set(self.neighbors(nid, target))

    # ── central mechanism ────────────────────────────────────────────

    def register_route(self, key: str, sid: int) -> None:
        self.subnet(sid)
        self.route_table[key] = sid

    def route(self, key: str) -> int:
        """Owning subnet for an attribute name or value kind."""
        try:
            sid = self.route_table[key]
        except KeyError:
            raise UnroutableInput(f"no route for {key!r}") from None
        self.scratch.routed.append((key, sid))
        return sid

    def has_route(self, key: str) -> bool:
        return key in self.route_table

    # ── merge / split / drop ─────────────────────────────────────────

    def merge_subnets(self, a: int, b: int, name: str) -> int:
        """
        Merge subnets *a* and *b* into a new subnet *name*.

        Equal payloads collapse onto the lower neuron id; connections of
        the retired neuron are rewired to the survivor. Parent links,
        subnet endpoints and routes pointing at *a* or *b* move to the
        new subnet.
        """
        if a == b:
            raise StructureError(f"cannot merge subnet {a} with itself")
        sa, sb = self.subnet(a), self.subnet(b)
        if name in self._names:
            raise DuplicateSubnetName(f"subnet name {name!r} already used")

        new_id = self.create_subnet(name, sa.role, parent=sa.parent)
        merged = self.subnets[new_id]
        rewire: dict[EndpointRef, EndpointRef] = {SubnetRef(a): SubnetRef(new_id),
                                                  SubnetRef(b): SubnetRef(new_id)}

        for nid in sorted(set(sa.neuron_ids) | set(sb.neuron_ids)):
            neuron = self.neurons[nid]
            survivor = merged.by_value.get(neuron.payload)
            if survivor is None:
                merged.neuron_ids.append(nid)
                merged.by_value[neuron.payload] = nid
                neuron.home_subnets -= {a, b}
                neuron.home_subnets.add(new_id)
                continue
            # ascending ids: the survivor is always the lower one
            rewire[NeuronRef(nid)] = NeuronRef(survivor)
            for other in neuron.home_subnets - {a, b}:
                holder = self.subnets[other]
                holder.neuron_ids.remove(nid)
                if survivor not in holder.neuron_ids:
                    holder.neuron_ids.append(survivor)
                    self.neurons[survivor].home_subnets.add(other)
            del self.neurons[nid]

        self._retire_subnets((a, b), new_id)
        self._rewrite_endpoints(rewire)
        self.rebuild_indexes()
        log.info("Merged subnets %d and %d into %d %r (%d neurons)",
                 a, b, new_id, name, len(merged))
        return new_id

    def split_subnet(
        self,
        sid: int,
        selector: Callable[[Value], bool],
        names: tuple[str, str] | None = None,
    ) -> tuple[int, int]:
        """
        Partition subnet *sid* into (selected, rest) by a payload predicate.

        Either side may be empty. Connections stay on their neurons; subnet
        endpoints, child parents and routes move to the selected side.
        """
        orig = self.subnet(sid)
        sel_name, rest_name = names or (f"{orig.name}.selected", f"{orig.name}.rest")
        for n in (sel_name, rest_name):
            if n in self._names:
                raise DuplicateSubnetName(f"subnet name {n!r} already used")

        sel_id = self.create_subnet(sel_name, orig.role, parent=orig.parent)
        rest_id = self.create_subnet(rest_name, orig.role, parent=orig.parent)
        for nid in orig.neuron_ids:
            neuron = self.neurons[nid]
            side = sel_id if selector(neuron.payload) else rest_id
            self.subnets[side].neuron_ids.append(nid)
            neuron.home_subnets.discard(sid)
            neuron.home_subnets.add(side)

        self._retire_subnets((sid,), sel_id)
        self._rewrite_endpoints({SubnetRef(sid): SubnetRef(sel_id)})
        self.rebuild_indexes()
        log.info("Split subnet %d into %d (%d) and %d (%d)", sid,
                 sel_id, len(self.subnets[sel_id]),
                 rest_id, len(self.subnets[rest_id]))
        return sel_id, rest_id

    def drop_subnet(self, sid: int) -> None:
        """Remove a subnet, the neurons living only in it, and dangling links."""
        subnet = self.subnet(sid)
        gone: set[EndpointRef] = {SubnetRef(sid)}
        for nid in subnet.neuron_ids:
            neuron = self.neurons[nid]
            neuron.home_subnets.discard(sid)
            if not neuron.home_subnets:
                gone.add(NeuronRef(nid))
                del self.neurons[nid]
        del self.subnets[sid]
        for other in self.subnets.values():
            if other.parent == sid:
                other.parent = None
        self.route_table = {k: v for k, v in self.route_table.items() if v != sid}

        for cid in sorted(self.connections):
            conn = self.connections[cid]
            kept = tuple(r for r in conn.endpoints if r not in gone)
            if len(kept) < 2:
                del self.connections[cid]
            elif len(kept) != len(conn.endpoints):
                conn.endpoints = kept
        self.rebuild_indexes()

    def _retire_subnets(self, retired: tuple[int, ...], successor: int) -> None:
        for sid in retired:
            del self.subnets[sid]
        for subnet in self.subnets.values():
            if subnet.parent in retired:
                subnet.parent = successor
        for key, sid in self.route_table.items():
            if sid in retired:
                self.route_table[key] = successor

    def _rewrite_endpoints(self, mapping: dict[EndpointRef, EndpointRef]) -> None:
        """
        Replace endpoints per *mapping*. Connections that shrink below two
        distinct endpoints are dropped; connections whose key now collides
        are fused into the lower id with summed occurrences.
        """
        seen: dict[ConnectionKey, int] = {}
        for cid in sorted(self.connections):
            conn = self.connections[cid]
            if any(r in mapping for r in conn.endpoints):
                refs: list[EndpointRef] = []
                for r in conn.endpoints:
                    r = mapping.get(r, r)
                    if r not in refs:
                        refs.append(r)
                if len(refs) < 2:
                    del self.connections[cid]
                    continue
                conn.endpoints = tuple(refs)
            first = seen.get(conn.key)
            if first is None:
                seen[conn.key] = cid
                continue
            keeper = self.connections[first]
            keeper.occurrences += conn.occurrences
            keeper.weight = self.weight_for(keeper.occurrences)
            del self.connections[cid]

    # ── invariants ───────────────────────────────────────────────────

    def check_integrity(self) -> None:
        """Re-verify dedupe, weight law, references and kinds."""
        for subnet in self.subnets.values():
            payloads = [self.neurons[n].payload for n in subnet.neuron_ids
                        if n in self.neurons]
            if len(payloads) != len(subnet.neuron_ids):
                raise IntegrityError(f"subnet {subnet.name!r} lists a missing neuron")
            if len(set(payloads)) != len(payloads):
                raise IntegrityError(f"subnet {subnet.name!r} holds duplicate values")
            if subnet.parent is not None and subnet.parent not in self.subnets:
                raise IntegrityError(f"subnet {subnet.name!r} has a dangling parent")
        for neuron in self.neurons.values():
            if not neuron.home_subnets:
                raise IntegrityError(f"neuron {neuron.id} has no home subnet")
            for sid in neuron.home_subnets:
                if sid not in self.subnets or neuron.id not in self.subnets[sid].neuron_ids:
                    raise IntegrityError(f"neuron {neuron.id} has a dangling home {sid}")
        for conn in self.connections.values():
            for ref in conn.endpoints:
                if not self._resolves(ref):
                    raise IntegrityError(f"connection {conn.id} endpoint {ref} dangles")
            if conn.weight != self.weight_for(conn.occurrences):
                raise IntegrityError(f"connection {conn.id} breaks the weight law")
            if conn.kind is not self._derive_kind(conn.endpoints):
                raise IntegrityError(f"connection {conn.id} has a stale kind")
        for key, sid in self.route_table.items():
            if sid not in self.subnets:
                raise IntegrityError(f"route {key!r} points at missing subnet {sid}")

    def stats(self) -> dict[str, int]:
        return {
            "subnets": len(self.subnets),
            "neurons": len(self.neurons),
            "connections": len(self.connections),
        }
