"""
Prior-knowledge subnets: number systems, months, time structure, operators.

Every builder is get-or-create on its subnet name, registers a
``kind:<value-kind>`` route for the central mechanism, and only connects
what it inserts, so rebuilding never duplicates values.

Labels used between prior neurons:

  - ``less than``     n → n+1 in a number system (directed)
  - ``part k of m``   digit → composite number (directed, k-th of m digits)
  - ``next``          month → following month, Dec → Jan closes the cycle
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_UP, Decimal

from src.core.config import PriorConfig
from src.core.errors import InvalidRange, MissingPriorSubnet
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef, SubnetRef, SubnetRole
from src.mesh.values import (
    DateValue,
    DecValue,
    IntValue,
    MonthValue,
    OperatorValue,
    TimeValue,
    TokenValue,
    kind_precision,
)

log = logging.getLogger(__name__)

LESS_THAN = "less than"
NEXT = "next"

ARITHMETIC_OPERATORS = ("+", "−", "×", "÷")
RELATIONAL_OPERATORS = ("<", ">", "=", "≤", "≥", "≠")

HOUR = TokenValue("hour")
MINUTE = TokenValue("minute")

ROUTE_INTEGER = "kind:int"
ROUTE_DECIMAL_PREFIX = "kind:dec"
ROUTE_MONTH = "kind:month"
ROUTE_TIME = "kind:time"
ROUTE_ARITHMETIC = "op:arithmetic"
ROUTE_RELATIONAL = "op:relational"


def part_label(k: int, m: int) -> str:
    return f"part {k} of {m}"


def decimal_route(precision: int) -> str:
    return f"{ROUTE_DECIMAL_PREFIX}{precision}"


@dataclass
class PriorCatalog:
    """Ids of the prior-knowledge subnets a mesh was built with."""
    integer_subnet: int | None = None
    decimal_subnets: dict[int, int] = field(default_factory=dict)   # precision → subnet
    month_subnet: int | None = None
    time_subnet: int | None = None
    arithmetic_subnet: int | None = None
    relational_subnet: int | None = None

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> PriorCatalog:
        """Recover the catalog from the route table (e.g. after loading)."""
        get = mesh.route_table.get
        decimals = {
            int(key[len(ROUTE_DECIMAL_PREFIX):]): sid
            for key, sid in mesh.route_table.items()
            if key.startswith(ROUTE_DECIMAL_PREFIX) and key[len(ROUTE_DECIMAL_PREFIX):].isdigit()
        }
        return cls(
            integer_subnet=get(ROUTE_INTEGER),
            decimal_subnets=decimals,
            month_subnet=get(ROUTE_MONTH),
            time_subnet=get(ROUTE_TIME),
            arithmetic_subnet=get(ROUTE_ARITHMETIC),
            relational_subnet=get(ROUTE_RELATIONAL),
        )

    @property
    def decimal_subnet(self) -> int | None:
        """Grid of the lowest precision, if any was built."""
        return self.decimal_subnets[min(self.decimal_subnets)] if self.decimal_subnets else None

    def prior_subnets(self) -> list[int]:
        decimals = [self.decimal_subnets[p] for p in sorted(self.decimal_subnets)]
        return [s for s in (self.integer_subnet, *decimals, self.month_subnet, self.time_subnet)
                if s is not None]

    def operator_subnets(self) -> list[int]:
        return [s for s in (self.arithmetic_subnet, self.relational_subnet)
                if s is not None]


def _get_or_create(mesh: Mesh, name: str, role: SubnetRole, route: str) -> int:
    if mesh.has_subnet_named(name):
        sid = mesh.subnet_by_name(name).id
    else:
        sid = mesh.create_subnet(name, role)
    mesh.register_route(route, sid)
    return sid


# ── Integers ─────────────────────────────────────────────────────────────

def _add_integer(mesh: Mesh, sid: int, n: int) -> None:
    """Insert *n* with its chain and digit links; no-op if present."""
    nid, created = mesh.insert_value(sid, IntValue(n))
    if not created:
        return
    below = mesh.find_neuron(sid, IntValue(n - 1))
    if below is not None:
        mesh.connect([NeuronRef(below), NeuronRef(nid)], {LESS_THAN}, directed=True)
    above = mesh.find_neuron(sid, IntValue(n + 1))
    if above is not None:
        mesh.connect([NeuronRef(nid), NeuronRef(above)], {LESS_THAN}, directed=True)

    digits = str(abs(n))
    if len(digits) < 2:
        return
    for k, ch in enumerate(digits, start=1):
        _add_integer(mesh, sid, int(ch))
        digit = mesh.find_neuron(sid, IntValue(int(ch)))
        mesh.connect([NeuronRef(digit), NeuronRef(nid)],
                     {part_label(k, len(digits))}, directed=True)


def build_integer_subnet(mesh: Mesh, lo: int, hi: int, name: str = "integers") -> int:
    """
    Integer number system over [lo, hi]: one neuron per value, consecutive
    values linked ``less than`` low → high, multi-digit values linked from
    each of their digit neurons with ``part k of m``.
    """
    if lo > hi:
        raise InvalidRange(f"integer range {lo}..{hi} is empty")
    sid = _get_or_create(mesh, name, SubnetRole.PRIOR, ROUTE_INTEGER)
    for n in range(lo, hi + 1):
        _add_integer(mesh, sid, n)
    log.info("Integer subnet %r covers %d..%d", name, lo, hi)
    return sid


def ensure_integer(mesh: Mesh, sid: int, n: int) -> int:
    """
    Neuron id for integer *n*, growing the number system contiguously
    when *n* lies outside its current range.
    """
    found = mesh.find_neuron(sid, IntValue(n))
    if found is not None:
        return found
    present = [v.payload.i for v in mesh.members(sid) if isinstance(v.payload, IntValue)]
    if not present:
        _add_integer(mesh, sid, n)
    elif n > max(present):
        for v in range(max(present) + 1, n + 1):
            _add_integer(mesh, sid, v)
    elif n < min(present):
        for v in range(min(present) - 1, n - 1, -1):
            _add_integer(mesh, sid, v)
    else:
        _add_integer(mesh, sid, n)
    log.debug("Integer subnet grown to include %d", n)
    return mesh.find_neuron(sid, IntValue(n))


# ── Decimals ─────────────────────────────────────────────────────────────

def build_decimal_subnet(
    mesh: Mesh,
    lo: DecValue,
    hi: DecValue,
    step: DecValue,
    name: str | None = None,
) -> int:
    """
    Decimal grid lo, lo+step, … ≤ hi with ``less than`` links. One grid
    exists per precision, routed as ``kind:dec<precision>``.
    """
    if not lo.precision == hi.precision == step.precision:
        raise InvalidRange("decimal range needs one precision for min, max and step")
    if step.scaled <= 0:
        raise InvalidRange(f"decimal step must be positive, got {step.text()}")
    if lo.scaled > hi.scaled:
        raise InvalidRange(f"decimal range {lo.text()}..{hi.text()} is empty")

    p = lo.precision
    name = name or f"dec{p} decimals"
    sid = _get_or_create(mesh, name, SubnetRole.PRIOR, decimal_route(p))
    previous: int | None = None
    for scaled in range(lo.scaled, hi.scaled + 1, step.scaled):
        nid, created = mesh.insert_value(sid, DecValue(scaled, p))
        if created and previous is not None:
            mesh.connect([NeuronRef(previous), NeuronRef(nid)], {LESS_THAN}, directed=True)
        previous = nid
    log.info("Decimal subnet %r covers %s..%s step %s",
             name, lo.text(), hi.text(), step.text())
    return sid


def decimal_grid(cfg: PriorConfig, precision: int) -> tuple[DecValue, DecValue, DecValue]:
    """
    The configured decimal range at *precision* places: min rounded up,
    max rounded down, step at least one unit of the last place.
    """
    unit = Decimal(1).scaleb(-precision)
    lo = Decimal(str(cfg.decimal_min)).quantize(unit, rounding=ROUND_CEILING)
    hi = max(lo, Decimal(str(cfg.decimal_max)).quantize(unit, rounding=ROUND_FLOOR))
    step = max(unit, Decimal(str(cfg.decimal_step)).quantize(unit, rounding=ROUND_HALF_UP))
    return (DecValue.of(lo, precision), DecValue.of(hi, precision),
            DecValue.of(step, precision))


def _decimal_members(mesh: Mesh, sid: int, precision: int) -> list[int]:
    return sorted(n.payload.scaled for n in mesh.members(sid)
                  if isinstance(n.payload, DecValue) and n.payload.precision == precision)


def _chain(mesh: Mesh, sid: int, p: int, start: int, stop: int, step: int) -> None:
    """Grow the grid from existing *start* toward *stop* (exclusive), one *step* at a time."""
    previous = mesh.find_neuron(sid, DecValue(start, p))
    for scaled in range(start + step, stop, step):
        nid, _ = mesh.insert_value(sid, DecValue(scaled, p))
        pair = [previous, nid] if step > 0 else [nid, previous]
        mesh.connect([NeuronRef(n) for n in pair], {LESS_THAN}, directed=True)
        previous = nid


def ensure_decimal(mesh: Mesh, sid: int, value: DecValue) -> int:
    """
    Neuron id for *value*, growing the grid contiguously by its step when
    *value* lies outside the current range. Off-grid values are inserted
    between their closest neighbors.
    """
    found = mesh.find_neuron(sid, value)
    if found is not None:
        return found
    p = value.precision
    present = _decimal_members(mesh, sid, p)
    step = min((b - a for a, b in zip(present, present[1:])), default=1)
    if present and value.scaled > present[-1]:
        _chain(mesh, sid, p, present[-1], value.scaled + 1, step)
    elif present and value.scaled < present[0]:
        _chain(mesh, sid, p, present[0], value.scaled - 1, -step)

    nid, created = mesh.insert_value(sid, value)
    if created:
        present = _decimal_members(mesh, sid, p)
        below = max((s for s in present if s < value.scaled), default=None)
        above = min((s for s in present if s > value.scaled), default=None)
        if below is not None:
            mesh.connect([NeuronRef(mesh.find_neuron(sid, DecValue(below, p))), NeuronRef(nid)],
                         {LESS_THAN}, directed=True)
        if above is not None:
            mesh.connect([NeuronRef(nid), NeuronRef(mesh.find_neuron(sid, DecValue(above, p)))],
                         {LESS_THAN}, directed=True)
    log.debug("Decimal subnet grown to include %s", value.text())
    return nid


# ── Months, time, operators ──────────────────────────────────────────────

def build_month_subnet(mesh: Mesh, name: str = "months") -> int:
    """Twelve month neurons chained ``next``, Dec → Jan closing the cycle."""
    sid = _get_or_create(mesh, name, SubnetRole.PRIOR, ROUTE_MONTH)
    ids = [mesh.insert_value(sid, MonthValue(i))[0] for i in range(1, 13)]
    for i, nid in enumerate(ids):
        mesh.connect([NeuronRef(nid), NeuronRef(ids[(i + 1) % 12])], {NEXT}, directed=True)
    return sid


def build_time_subnet(mesh: Mesh, name: str = "time-structure") -> int:
    """Time structure: an ``hour`` and a ``minute`` neuron, no seconds."""
    sid = _get_or_create(mesh, name, SubnetRole.PRIOR, ROUTE_TIME)
    hour, _ = mesh.insert_value(sid, HOUR)
    minute, _ = mesh.insert_value(sid, MINUTE)
    mesh.connect([NeuronRef(hour), NeuronRef(minute)])
    return sid


def _build_operator_subnet(mesh: Mesh, name: str, route: str,
                           symbols: Iterable[str]) -> int:
    sid = _get_or_create(mesh, name, SubnetRole.OPERATOR, route)
    ids = [mesh.insert_value(sid, OperatorValue(s))[0] for s in symbols]
    # data flows both ways between operators
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            mesh.connect([NeuronRef(a), NeuronRef(b)], directed=False)
    return sid


def build_operator_subnets(mesh: Mesh) -> tuple[int, int]:
    """Arithmetic {+, −, ×, ÷} and relational {<, >, =, ≤, ≥, ≠} subnets."""
    arithmetic = _build_operator_subnet(mesh, "arithmetic", ROUTE_ARITHMETIC,
                                        ARITHMETIC_OPERATORS)
    relational = _build_operator_subnet(mesh, "relational", ROUTE_RELATIONAL,
                                        RELATIONAL_OPERATORS)
    return arithmetic, relational


# ── Interconnections ─────────────────────────────────────────────────────

def _require(sid: int | None, what: str) -> int:
    if sid is None:
        raise MissingPriorSubnet(f"{what} subnet has not been built")
    return sid


def link_prior(mesh: Mesh, catalog: PriorCatalog) -> int:
    """
    Interconnect the prior subnets: month i ↔ integer i, ``hour`` ↔
    integers 1..24, ``minute`` ↔ integers 0..59 where present, and every
    operator subnet ↔ every prior subnet at subnet level.

    Returns the number of connections touched. Running it again creates
    no new connections; their occurrences grow instead.
    """
    touched = 0
    if catalog.month_subnet is not None:
        ints = _require(catalog.integer_subnet, "integer")
        for i in range(1, 13):
            month = mesh.find_neuron(catalog.month_subnet, MonthValue(i))
            if month is None:
                raise MissingPriorSubnet(f"month {i} missing from month subnet")
            mesh.connect([NeuronRef(month), NeuronRef(ensure_integer(mesh, ints, i))],
                         {"month number"})
            touched += 1

    if catalog.time_subnet is not None:
        ints = _require(catalog.integer_subnet, "integer")
        hour = mesh.find_neuron(catalog.time_subnet, HOUR)
        minute = mesh.find_neuron(catalog.time_subnet, MINUTE)
        if hour is None or minute is None:
            raise MissingPriorSubnet("time subnet lacks hour/minute neurons")
        for h in range(1, 25):
            mesh.connect([NeuronRef(hour), NeuronRef(ensure_integer(mesh, ints, h))],
                         {"hour"})
            touched += 1
        for m in range(0, 60):
            nid = mesh.find_neuron(ints, IntValue(m))
            if nid is not None:
                mesh.connect([NeuronRef(minute), NeuronRef(nid)], {"minute"})
                touched += 1

    for op in catalog.operator_subnets():
        for prior in catalog.prior_subnets():
            mesh.connect([SubnetRef(op), SubnetRef(prior)], {"operates on"})
            touched += 1

    log.info("Prior subnets linked (%d connections touched)", touched)
    return touched


def link_neuron_to_prior(mesh: Mesh, nid: int, catalog: PriorCatalog) -> int:
    """Link one attribute neuron to the prior neurons describing its value."""
    value = mesh.value(nid)
    me = NeuronRef(nid)
    touched = 0

    if isinstance(value, DateValue):
        ints = _require(catalog.integer_subnet, "integer")
        months = _require(catalog.month_subnet, "month")
        mesh.connect([me, NeuronRef(ensure_integer(mesh, ints, value.day))], {"day"})
        month = mesh.find_neuron(months, MonthValue(value.month))
        mesh.connect([me, NeuronRef(month)], {"month"})
        touched += 2

    elif isinstance(value, TimeValue):
        ints = _require(catalog.integer_subnet, "integer")
        time = _require(catalog.time_subnet, "time")
        mesh.connect([me, NeuronRef(ensure_integer(mesh, ints, value.hour))], {"hour"})
        mesh.connect([me, NeuronRef(mesh.find_neuron(time, HOUR))], {"hour"})
        touched += 2
        if value.minute:
            mesh.connect([me, NeuronRef(ensure_integer(mesh, ints, value.minute))],
                         {"minute"})
            mesh.connect([me, NeuronRef(mesh.find_neuron(time, MINUTE))], {"minute"})
            touched += 2

    elif isinstance(value, IntValue):
        ints = _require(catalog.integer_subnet, "integer")
        mesh.connect([me, NeuronRef(ensure_integer(mesh, ints, value.i))], {"value"})
        touched += 1

    elif isinstance(value, DecValue):
        decimals = _require(catalog.decimal_subnets.get(value.precision),
                            f"dec{value.precision} decimal")
        mesh.connect([me, NeuronRef(ensure_decimal(mesh, decimals, value))], {"value"})
        touched += 1

    return touched


def link_attribute_to_prior(mesh: Mesh, attribute_subnet: int,
                            catalog: PriorCatalog) -> int:
    """Link every neuron of an attribute subnet to prior knowledge."""
    touched = 0
    for neuron in mesh.members(attribute_subnet):
        touched += link_neuron_to_prior(mesh, neuron.id, catalog)
    return touched


# ── Catalog for a schema ─────────────────────────────────────────────────

def build_catalog(mesh: Mesh, kinds: Iterable[str], cfg: PriorConfig | None = None) -> PriorCatalog:
    """
    Build the prior subnets a set of schema value kinds needs, then link
    them. Integers back ``int``, ``date-dm`` and ``time-hm``; one decimal grid per
    ``decN`` precision; operators are always present.
    """
    cfg = cfg or PriorConfig()
    kinds = list(kinds)
    catalog = PriorCatalog()

    if any(k in ("int", "date-dm", "time-hm") for k in kinds):
        catalog.integer_subnet = build_integer_subnet(mesh, cfg.integer_min, cfg.integer_max)

    for p in sorted({p for p in (kind_precision(k) for k in kinds) if p is not None}):
        catalog.decimal_subnets[p] = build_decimal_subnet(mesh, *decimal_grid(cfg, p))
    if "date-dm" in kinds:
        catalog.month_subnet = build_month_subnet(mesh)
    if "time-hm" in kinds:
        catalog.time_subnet = build_time_subnet(mesh)
    catalog.arithmetic_subnet, catalog.relational_subnet = build_operator_subnets(mesh)

    link_prior(mesh, catalog)
    return catalog
