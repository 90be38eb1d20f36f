"""
Structural records of the mesh: neurons, subnets, connections.

These are plain dataclasses; all invariants are enforced by ``Mesh``,
which is the only writer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Union

from src.mesh.values import Value


class SubnetRole(str, Enum):
    PRIOR = "prior"
    ATTRIBUTE = "attribute"
    TARGET = "target"
    SHAPE = "shape"
    SUPER = "super"
    LABEL = "label"
    BIAS = "bias"
    OPERATOR = "operator"
    CENTRAL = "central"


class ConnectionKind(str, Enum):
    NEURON_NEURON_SAME_SUBNET = "neuron-neuron-same-subnet"
    NEURON_NEURON_CROSS_SUBNET = "neuron-neuron-cross-subnet"
    NEURON_NEURON_CENTRAL = "neuron-neuron-central"
    SUBNET_SUBNET = "subnet-subnet"
    SUBNET_SUBNET_CENTRAL = "subnet-subnet-central"
    NEURON_SUBNET = "neuron-subnet"
    NEURON_SUBNET_CENTRAL = "neuron-subnet-central"


# ── Endpoints ────────────────────────────────────────────────────────────

@dataclass(frozen=True, order=True)
class NeuronRef:
    id: int

    def __str__(self) -> str:
        return f"n{self.id}"


@dataclass(frozen=True, order=True)
class SubnetRef:
    id: int

    def __str__(self) -> str:
        return f"s{self.id}"


EndpointRef = Union[NeuronRef, SubnetRef]


def endpoint_sort_key(ref: EndpointRef) -> tuple[int, int]:
    """Neurons before subnets, then by id."""
    return (0 if isinstance(ref, NeuronRef) else 1, ref.id)


# ── Records ──────────────────────────────────────────────────────────────

@dataclass
class Neuron:
    """A memory cell holding exactly one value."""
    id: int
    payload: Value
    home_subnets: set[int] = field(default_factory=set)


@dataclass
class Subnet:
    """A named collection of neurons with pairwise-distinct payloads."""
    id: int
    name: str
    role: SubnetRole
    neuron_ids: list[int] = field(default_factory=list)
    parent: int | None = None
    # payload → neuron id; kept in step with neuron_ids by Mesh
    by_value: dict[Value, int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.neuron_ids)


ConnectionKey = tuple[frozenset, frozenset]


@dataclass
class Connection:
    """
    A labeled, weighted link between two or more endpoints.

    Direction, when set, is the endpoint order. Lower weight means a
    stronger bond: weight starts at the initial value and drops on every
    repeated observation.
    """
    id: int
    endpoints: tuple[EndpointRef, ...]
    labels: frozenset[str]
    weight: Decimal
    occurrences: int
    kind: ConnectionKind
    directed: bool = False

    @property
    def key(self) -> ConnectionKey:
        return (frozenset(self.endpoints), self.labels)

    @property
    def neuron_ids(self) -> list[int]:
        return [e.id for e in self.endpoints if isinstance(e, NeuronRef)]

    def label_text(self) -> str:
        return ", ".join(sorted(self.labels)) if self.labels else "null"
