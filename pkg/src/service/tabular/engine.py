"""
Tabular engine — trains records into a mesh and predicts a target value.

This is the only interface the orchestrator uses for tabular data.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation

from src.core.config import PriorConfig
from src.core.errors import (
    BiasOnCategorical,
    DuplicateAttribute,
    DuplicateBiasTag,
    EmptyIntersection,
    EmptySubnet,
    EmptyVotes,
    MixedKinds,
    NoAxisForCategorical,
    NoEvidence,
    NotAttributeSubnet,
    SchemaMismatch,
    UnknownBiasTag,
    ValueParseError,
)
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef, SubnetRef, SubnetRole
from src.mesh.values import (
    DecValue,
    IntValue,
    TokenValue,
    Value,
    axis_of,
    distance,
    kind_precision,
    matches_kind,
    sort_key,
)
from src.service.prior import PriorCatalog, build_catalog, link_neuron_to_prior
from src.service.tabular.schema import Schema
from src.service.tabular.trace import (
    AnchorResult,
    AnchorTrace,
    BiasApplied,
    Prediction,
    PredictionTrace,
    VoteTrace,
    decimal_text,
)

log = logging.getLogger(__name__)

IF_THEN = "If...Then"
ROUTES = "routes"

CENTRAL_SUBNET = "central"
BIAS_SUBNET = "bias"
ROUTE_BIAS = "bias"


@dataclass
class TrainReport:
    neurons_created: int = 0
    connections_created: int = 0
    connections_updated: int = 0
    prior_links: int = 0

    def __add__(self, other: TrainReport) -> TrainReport:
        return TrainReport(
            self.neurons_created + other.neurons_created,
            self.connections_created + other.connections_created,
            self.connections_updated + other.connections_updated,
            self.prior_links + other.prior_links,
        )


@dataclass(frozen=True)
class Nearest:
    neuron: int
    distance: Decimal
    exact: bool


@dataclass(frozen=True)
class BiasRule:
    tag: str
    adjustment: Decimal

    def __post_init__(self) -> None:
        try:
            adjustment = Decimal(str(self.adjustment).strip())
        except InvalidOperation as e:
            raise ValueParseError(f"bias adjustment {self.adjustment!r} is not a number") from e
        if not adjustment.is_finite():
            raise ValueParseError(f"bias adjustment {self.adjustment!r} is not finite")
        object.__setattr__(self, "adjustment", adjustment)

    @property
    def label(self) -> str:
        return f"{self.adjustment:+f}"


def is_numeric_kind(kind: str) -> bool:
    return kind == "int" or kind_precision(kind) is not None


def _numeric_value(x: Decimal, kind: str, rounding: str) -> Value:
    if kind == "int":
        return IntValue(int(x.quantize(Decimal(1), rounding=rounding)))
    precision = kind_precision(kind)
    q = x.quantize(Decimal(1).scaleb(-precision), rounding=rounding)
    return DecValue.of(q, precision)


def aggregate(
    votes: Sequence[Value],
    kind: str,
    rounding: str = ROUND_HALF_UP,
    tiebreak: Callable[[Value], tuple] | None = None,
) -> Value:
    """
    Combine anchor results into one value of *kind*.

    Numeric kinds average at the kind's precision; every other kind takes
    the plurality, ties settled by *tiebreak* (lowest key wins) or value
    order.
    """
    if not votes:
        raise EmptyVotes("nothing to aggregate")
    if any(not matches_kind(v, kind) for v in votes):
        raise MixedKinds(f"votes {[v.text() for v in votes]} are not all of kind {kind}")

    if is_numeric_kind(kind):
        mean = sum((axis_of(v) for v in votes), Decimal(0)) / Decimal(len(votes))
        return _numeric_value(mean, kind, rounding)

    counts = Counter(votes)
    best = max(counts.values())
    tied = [v for v, c in counts.items() if c == best]
    return min(tied, key=tiebreak or sort_key)


class TabularEngine:
    """
    Schema-driven training and prediction over one mesh.

    Responsibilities:
      - Materialize one subnet per schema attribute plus central routing
      - Train records as pairwise ``If...Then`` connections
      - Predict via nearest anchors, candidate sets and vote resolution
      - Keep bias rules in a dedicated subnet
    """

    def __init__(
        self,
        mesh: Mesh,
        schema: Schema | None = None,
        prior_cfg: PriorConfig | None = None,
    ) -> None:
        self.mesh = mesh
        self._prior_cfg = prior_cfg or PriorConfig()
        if schema is None and "schema" in mesh.annotations:
            schema = Schema.from_annotation(mesh.annotations["schema"])
        self.schema = schema
        self.catalog = PriorCatalog.from_mesh(mesh)

    @property
    def has_schema_subnets(self) -> bool:
        return "schema" in self.mesh.annotations

    def _schema(self) -> Schema:
        if self.schema is None:
            raise SchemaMismatch("no schema defined on this mesh")
        return self.schema

    @property
    def target_subnet(self) -> int:
        return self.mesh.route(self._schema().target.name)

    # ── schema ───────────────────────────────────────────────────────

    def define_schema(self, schema: Schema) -> None:
        """Build prior subnets for the schema's kinds and one subnet per attribute."""
        if self.has_schema_subnets:
            raise DuplicateAttribute("mesh already carries a schema")
        mesh = self.mesh
        self.catalog = build_catalog(mesh, schema.kinds, self._prior_cfg)

        central = mesh.create_subnet(CENTRAL_SUBNET, SubnetRole.CENTRAL)
        mesh.register_route(CENTRAL_SUBNET, central)
        for a in schema.attributes:
            role = SubnetRole.TARGET if a.is_target else SubnetRole.ATTRIBUTE
            sid = mesh.create_subnet(a.name, role)
            mesh.register_route(a.name, sid)
            token, _ = mesh.insert_value(central, TokenValue(a.name))
            mesh.connect([NeuronRef(token), SubnetRef(sid)], {ROUTES})

        mesh.annotations["schema"] = schema.to_annotation()
        self.schema = schema
        log.info("Schema defined: %s (target %r)",
                 ", ".join(schema.names), schema.target.name)

    # ── training ─────────────────────────────────────────────────────

    def train_record(self, record: Mapping[str, Value]) -> TrainReport:
        schema = self._schema()
        schema.check_record(record, complete=True)
        mesh = self.mesh
        report = TrainReport()

        ids: list[int] = []
        for a in schema.attributes:
            nid, created = mesh.insert_value(mesh.route(a.name), record[a.name])
            if created:
                report.neurons_created += 1
                report.prior_links += link_neuron_to_prior(mesh, nid, self.catalog)
            ids.append(nid)

        # directed in schema order
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                endpoints = [NeuronRef(a), NeuronRef(b)]
                if mesh.connection_between(endpoints, {IF_THEN}) is None:
                    report.connections_created += 1
                else:
                    report.connections_updated += 1
                mesh.connect(endpoints, {IF_THEN}, directed=True)
        return report

    def train(self, records: Iterable[Mapping[str, Value]]) -> TrainReport:
        total = TrainReport()
        count = 0
        for record in records:
            total = total + self.train_record(record)
            count += 1
        log.info("Trained %d records (%d neurons, %d new / %d repeated connections)",
                 count, total.neurons_created, total.connections_created,
                 total.connections_updated)
        return total

    def confirm(self, record: Mapping[str, Value]) -> TrainReport:
        """Feed a verified record back into the mesh; same effect as training."""
        return self.train_record(record)

    # ── retrieval ────────────────────────────────────────────────────

    def _rank(self, ids: Iterable[int], v: Value) -> list[Nearest]:
        """Neurons ordered by closeness to *v*: exact, distance, axis, id."""
        if axis_of(v) is None:
            return [Nearest(n, Decimal(0), True) for n in sorted(ids)
                    if self.mesh.value(n) == v]
        scored = []
        for n in ids:
            payload = self.mesh.value(n)
            d = distance(payload, v)
            if d is None:
                continue
            exact = payload == v
            scored.append((d, not exact, axis_of(payload), n, exact))
        scored.sort()
        return [Nearest(n, d, exact) for d, _, _, n, exact in scored]

    def nearest_neuron(self, subnet: int, v: Value) -> Nearest:
        """Exact member of *subnet* for *v*, else the closest on the value axis."""
        members = self.mesh.subnet(subnet).neuron_ids
        if not members:
            raise EmptySubnet(f"subnet {self.mesh.subnets[subnet].name!r} is empty")
        ranked = self._rank(members, v)
        if not ranked:
            raise NoAxisForCategorical(
                f"{v.text()!r} is not in subnet {self.mesh.subnets[subnet].name!r}"
            )
        return ranked[0]

    def nearest_neurons(self, subnet: int, v: Value, k: int) -> list[Nearest]:
        """The *k* best anchors; categorical values only ever match exactly."""
        first = self.nearest_neuron(subnet, v)
        if k == 1:
            return [first]
        return self._rank(self.mesh.subnet(subnet).neuron_ids, v)[:k]

    def candidate_set(self, anchor: int, other: int, target: int) -> list[int]:
        """
        Neurons of *other* connected to *anchor* that share at least one
        target neuron with it.
        """
        mesh = self.mesh
        if other == target or mesh.subnet(other).role is not SubnetRole.ATTRIBUTE:
            raise NotAttributeSubnet(f"subnet {mesh.subnets[other].name!r} is not an attribute")
        anchor_targets = mesh.targets_of(anchor, target)
        return [n for n in mesh.neighbors(anchor, other)
                if mesh.targets_of(n, target) & anchor_targets]

    def _strength(self, t: int, *others: int) -> tuple[Decimal, int]:
        """Summed weight and occurrences of the bonds between *t* and *others*."""
        weight, occurrences = Decimal(0), 0
        for o in others:
            conn = self.mesh.bond(t, o)
            if conn is not None:
                weight += conn.weight
                occurrences += conn.occurrences
        return weight, occurrences

    def resolve_vote(self, selected: int, anchor: int, target: int) -> int:
        """Target neuron shared by *selected* and *anchor*; strongest bond wins ties."""
        shared = self.mesh.targets_of(selected, target) & self.mesh.targets_of(anchor, target)
        if not shared:
            raise EmptyIntersection(f"neurons {selected} and {anchor} share no target")

        def key(t: int) -> tuple:
            weight, occurrences = self._strength(t, selected, anchor)
            return (weight, -occurrences, t)

        return min(shared, key=key)

    def _plurality(self, votes: list[int], anchor: int) -> int:
        counts = Counter(votes)
        best = max(counts.values())
        tied = [t for t, c in counts.items() if c == best]

        def key(t: int) -> tuple:
            weight, occurrences = self._strength(t, anchor)
            return (weight, -occurrences, t)

        return min(tied, key=key)

    # ── bias ─────────────────────────────────────────────────────────

    def add_bias_rule(self, rule: BiasRule) -> int:
        schema = self._schema()
        if not is_numeric_kind(schema.target.kind):
            raise BiasOnCategorical(f"target {schema.target.name!r} is not numeric")
        mesh = self.mesh
        if mesh.has_route(ROUTE_BIAS):
            sid = mesh.route_table[ROUTE_BIAS]
        else:
            sid = mesh.create_subnet(BIAS_SUBNET, SubnetRole.BIAS)
            mesh.register_route(ROUTE_BIAS, sid)
        if mesh.find_neuron(sid, TokenValue(rule.tag)) is not None:
            raise DuplicateBiasTag(f"bias tag {rule.tag!r} already stored")

        nid, _ = mesh.insert_value(sid, TokenValue(rule.tag))
        mesh.connect([NeuronRef(nid), SubnetRef(self.target_subnet)], {rule.label})
        log.info("Bias rule %r = %s", rule.tag, rule.label)
        return nid

    def bias_rules(self) -> dict[str, Decimal]:
        """Stored bias rules, tag → adjustment, in insertion order."""
        mesh = self.mesh
        if not mesh.has_route(ROUTE_BIAS) or self.schema is None:
            return {}
        target = SubnetRef(self.target_subnet)
        rules: dict[str, Decimal] = {}
        for neuron in mesh.members(mesh.route_table[ROUTE_BIAS]):
            for conn in mesh.connections_of(NeuronRef(neuron.id)):
                if target in conn.endpoints and len(conn.labels) == 1:
                    rules[neuron.payload.text()] = Decimal(next(iter(conn.labels)))
        return rules

    def _active_bias(self, tags: Sequence[str]) -> list[tuple[str, Decimal]]:
        if not tags:
            return []
        if not is_numeric_kind(self._schema().target.kind):
            raise BiasOnCategorical("bias rules apply to numeric targets only")
        rules = self.bias_rules()
        active = []
        for tag in dict.fromkeys(tags):
            if tag not in rules:
                raise UnknownBiasTag(f"no bias rule {tag!r}")
            active.append((tag, rules[tag]))
        return active

    # ── prediction ───────────────────────────────────────────────────

    def predict(self, partial: Mapping[str, Value], bias_tags: Sequence[str] = ()) -> Prediction:
        """
        Predict the target of *partial* (every input, no target).

        For each input attribute the nearest neuron is the anchor. Every
        other attribute contributes one vote: its candidate neuron closest
        to the query value, resolved to the target neuron it shares with
        the anchor. Each anchor keeps its plurality vote and the anchor
        results are aggregated, then active bias adjustments are added.
        """
        schema = self._schema()
        schema.check_record(partial, complete=False)
        mesh = self.mesh
        target = schema.target
        tsid = mesh.route(target.name)
        active = self._active_bias(bias_tags)
        k = mesh.config.nearest_k

        trace = PredictionTrace(target=target.name)
        results: list[tuple[int, int]] = []

        for a in schema.inputs:
            v = partial[a.name]
            try:
                anchors = self.nearest_neurons(mesh.route(a.name), v, k)
            except (EmptySubnet, NoAxisForCategorical) as e:
                log.warning("Anchor for %s skipped: %s", a.name, e)
                continue

            for rank, anchor in enumerate(anchors, start=1):
                trace.anchors.append(AnchorTrace(
                    attribute=a.name,
                    value=v.text(),
                    neuron=anchor.neuron,
                    neuron_value=mesh.value(anchor.neuron).text(),
                    exact=anchor.exact,
                    distance=decimal_text(anchor.distance),
                    rank=rank,
                ))
                votes = self._votes(a.name, anchor.neuron, partial, tsid, trace)
                result = AnchorResult(a.name, anchor.neuron, votes)
                if votes:
                    r = self._plurality(votes, anchor.neuron)
                    result.result, result.result_value = r, mesh.value(r).text()
                    results.append((anchor.neuron, r))
                else:
                    log.warning("Anchor %s=%s cast no votes", a.name, v.text())
                trace.results.append(result)

        if not results:
            raise NoEvidence(f"no anchor produced a vote for {target.name!r}")

        values = [mesh.value(r) for _, r in results]
        final = aggregate(values, target.kind, mesh.config.rounding_mode,
                          tiebreak=self._result_tiebreak(results))
        trace.aggregated = [v.text() for v in values]
        trace.unbiased = final.text()

        if active:
            total = sum((adj for _, adj in active), Decimal(0))
            final = _numeric_value(axis_of(final) + total, target.kind,
                                   mesh.config.rounding_mode)
            trace.bias = [BiasApplied(tag, f"{adj:+f}") for tag, adj in active]
        trace.final = final.text()
        log.debug("Predicted %s = %s", target.name, final.text())
        return Prediction(final, trace)

    def _votes(
        self,
        attribute: str,
        anchor: int,
        partial: Mapping[str, Value],
        tsid: int,
        trace: PredictionTrace,
    ) -> list[int]:
        mesh = self.mesh
        votes: list[int] = []
        for b in self._schema().inputs:
            if b.name == attribute:
                continue
            vt = VoteTrace(attribute, anchor, b.name)
            trace.votes.append(vt)
            vt.candidates = self.candidate_set(anchor, mesh.route(b.name), tsid)
            if not vt.candidates:
                vt.skipped = "empty candidate set"
                log.debug("No candidates in %s for anchor %d", b.name, anchor)
                continue
            ranked = self._rank(vt.candidates, partial[b.name])
            if not ranked:
                vt.skipped = "no candidate matches the query value"
                continue
            selected = ranked[0].neuron
            vt.selected, vt.selected_value = selected, mesh.value(selected).text()
            vt.shared_targets = sorted(mesh.targets_of(selected, tsid)
                                       & mesh.targets_of(anchor, tsid))
            vote = self.resolve_vote(selected, anchor, tsid)
            vt.vote, vt.vote_value = vote, mesh.value(vote).text()
            votes.append(vote)
        return votes

    def _result_tiebreak(self, results: list[tuple[int, int]]) -> Callable[[Value], tuple]:
        """Across anchors: strongest anchor bond, then occurrences, then id."""
        keys: dict[Value, tuple] = {}
        for anchor, r in results:
            weight, occurrences = self._strength(r, anchor)
            key = (weight, -occurrences, r)
            value = self.mesh.value(r)
            keys[value] = min(keys.get(value, key), key)
        return lambda v: keys[v]

