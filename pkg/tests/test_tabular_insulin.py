"""Training and prediction on the insulin pump log (records 1–10)."""

from __future__ import annotations

from decimal import Decimal

import pytest

from src.core.errors import (
    DuplicateBiasTag,
    EmptyVotes,
    MixedKinds,
    NoEvidence,
    NoTarget,
    SchemaMismatch,
    UnknownBiasTag,
    ValueParseError,
)
from src.mesh.model import NeuronRef
from src.mesh.values import CategoryValue, DateValue, IntValue, TimeValue
from src.service.tabular import Attribute, AttributeRole, BiasRule, Schema, TabularEngine, aggregate
from src.service.tabular.engine import IF_THEN

from tests.conftest import make_engine


def query(date: str, time: str, schema: Schema) -> dict:
    return schema.parse_record({"date": date, "time": time}, complete=False)


def neuron_of(engine: TabularEngine, attribute: str, value) -> int:
    return engine.mesh.find_neuron(engine.mesh.route(attribute), value)


class TestTraining:
    def test_census(self, insulin_engine, insulin_records, insulin_schema):
        mesh = insulin_engine.mesh
        sizes = lambda: [len(mesh.subnet(mesh.route(n))) for n in ("date", "time", "insulin")]
        assert sizes() == [5, 6, 6]
        insulin_engine.train(insulin_records[10:])
        assert sizes() == [15, 12, 9]

    def test_repeated_pair_strengthens(self, insulin_engine):
        evening = neuron_of(insulin_engine, "time", TimeValue(18, 0))
        dose = neuron_of(insulin_engine, "insulin", IntValue(32))
        conn = insulin_engine.mesh.connection_between(
            [NeuronRef(evening), NeuronRef(dose)], {IF_THEN})
        assert conn.occurrences == 2
        assert conn.weight == Decimal("0.75")
        assert conn.directed and conn.endpoints[0] == NeuronRef(evening)

    def test_retraining_a_record_adds_no_neurons(self, insulin_engine, insulin_records):
        report = insulin_engine.train_record(insulin_records[1])
        assert report.neurons_created == 0
        assert report.connections_created == 0
        assert report.connections_updated == 3

    def test_confirm_stores_new_values(self, insulin_engine, insulin_records):
        record = insulin_records[10]
        assert record == {"date": DateValue(6, 6), "time": TimeValue(11, 0),
                          "insulin": IntValue(13)}
        report = insulin_engine.confirm(record)
        assert report.neurons_created == 2
        assert report.connections_created == 3
        assert report.prior_links > 0

    def test_incomplete_record(self, insulin_engine):
        with pytest.raises(SchemaMismatch):
            insulin_engine.train_record({"date": DateValue(1, 6), "time": TimeValue(8, 0)})

    def test_wrong_kind(self, insulin_engine):
        with pytest.raises(SchemaMismatch):
            insulin_engine.train_record({"date": DateValue(1, 6), "time": TimeValue(8, 0),
                                         "insulin": CategoryValue("13")})


class TestRetrieval:
    def test_nearest_is_exact_when_present(self, insulin_engine):
        mesh = insulin_engine.mesh
        found = insulin_engine.nearest_neuron(mesh.route("time"), TimeValue(17, 0))
        assert found.exact and found.distance == 0

    def test_nearest_by_axis(self, insulin_engine):
        mesh = insulin_engine.mesh
        found = insulin_engine.nearest_neuron(mesh.route("time"), TimeValue(11, 0))
        assert mesh.value(found.neuron) == TimeValue(10, 0)
        assert found.distance == 60 and not found.exact

    def test_nearest_tie_prefers_smaller_value(self, insulin_engine):
        mesh = insulin_engine.mesh
        found = insulin_engine.nearest_neuron(mesh.route("time"), TimeValue(9, 0))
        assert mesh.value(found.neuron) == TimeValue(8, 0)

    def test_candidate_set(self, insulin_engine):
        mesh = insulin_engine.mesh
        anchor = neuron_of(insulin_engine, "date", DateValue(5, 6))
        candidates = insulin_engine.candidate_set(
            anchor, mesh.route("time"), insulin_engine.target_subnet)
        assert [mesh.value(n) for n in candidates] == [TimeValue(8, 0), TimeValue(18, 0)]


class TestPrediction:
    @pytest.mark.parametrize("date,time,expected", [
        ("6-Jun", "11:00", "12"),
        ("6-Jun", "17:00", "33"),
    ])
    def test_predictions(self, insulin_engine, insulin_schema, date, time, expected):
        assert insulin_engine.predict(query(date, time, insulin_schema)).text == expected

    def test_trace_of_evening_prediction(self, insulin_engine, insulin_schema):
        trace = insulin_engine.predict(query("6-Jun", "17:00", insulin_schema)).trace
        anchors = {a.attribute: a for a in trace.anchors}
        assert anchors["date"].neuron_value == "5-Jun" and anchors["date"].distance == "1"
        assert anchors["time"].exact
        votes = {v.anchor_attribute: v for v in trace.votes}
        assert votes["date"].selected_value == "18:00" and votes["date"].vote_value == "32"
        assert votes["time"].selected_value == "4-Jun" and votes["time"].vote_value == "34"
        assert trace.aggregated == ["32", "34"]
        assert trace.unbiased == trace.final == "33"

    def test_trace_renders_as_yaml(self, insulin_engine, insulin_schema):
        text = insulin_engine.predict(query("6-Jun", "11:00", insulin_schema)).trace.render()
        assert text.startswith("target: insulin")
        assert "final: '12'" in text

    def test_prediction_leaves_mesh_unchanged(self, insulin_engine, insulin_schema):
        before = insulin_engine.mesh.stats()
        insulin_engine.predict(query("6-Jun", "11:00", insulin_schema))
        assert insulin_engine.mesh.stats() == before

    def test_target_in_query_is_rejected(self, insulin_engine):
        with pytest.raises(SchemaMismatch):
            insulin_engine.predict({"date": DateValue(6, 6), "time": TimeValue(11, 0),
                                    "insulin": IntValue(12)})


class TestBias:
    def test_adjustments_add_up(self, insulin_engine, insulin_schema):
        insulin_engine.add_bias_rule(BiasRule("extra-sugar", Decimal(2)))
        insulin_engine.add_bias_rule(BiasRule("fasting", Decimal(-3)))
        q = query("6-Jun", "11:00", insulin_schema)
        assert insulin_engine.predict(q, ["extra-sugar"]).text == "14"
        assert insulin_engine.predict(q, ["fasting"]).text == "9"
        both = insulin_engine.predict(q, ["extra-sugar", "fasting"])
        assert both.text == "11"
        assert both.trace.unbiased == "12"
        assert [b.tag for b in both.trace.bias] == ["extra-sugar", "fasting"]

    def test_rules_are_listed(self, insulin_engine):
        insulin_engine.add_bias_rule(BiasRule("extra-sugar", Decimal(2)))
        assert insulin_engine.bias_rules() == {"extra-sugar": Decimal(2)}

    def test_duplicate_tag(self, insulin_engine):
        insulin_engine.add_bias_rule(BiasRule("extra-sugar", Decimal(2)))
        with pytest.raises(DuplicateBiasTag):
            insulin_engine.add_bias_rule(BiasRule("extra-sugar", Decimal(1)))

    def test_unknown_tag(self, insulin_engine, insulin_schema):
        with pytest.raises(UnknownBiasTag):
            insulin_engine.predict(query("6-Jun", "11:00", insulin_schema), ["exercise"])

    @pytest.mark.parametrize("adjustment", ["abc", "", "2x", "nan", "inf"])
    def test_adjustment_must_be_a_number(self, adjustment):
        with pytest.raises(ValueParseError):
            BiasRule("extra-sugar", adjustment)

    def test_adjustment_text_is_exact(self):
        assert BiasRule("fasting", " -3.5 ").adjustment == Decimal("-3.5")


class TestAggregate:
    def test_mean_rounds_half_up(self):
        assert aggregate([IntValue(12), IntValue(13)], "int") == IntValue(13)

    def test_plurality_for_categories(self):
        votes = [CategoryValue("b"), CategoryValue("a"), CategoryValue("b")]
        assert aggregate(votes, "cat") == CategoryValue("b")

    def test_plurality_tie_uses_tiebreak(self):
        votes = [CategoryValue("a"), CategoryValue("b")]
        order = {CategoryValue("a"): (1,), CategoryValue("b"): (0,)}
        assert aggregate(votes, "cat", tiebreak=order.__getitem__) == CategoryValue("b")

    def test_empty(self):
        with pytest.raises(EmptyVotes):
            aggregate([], "int")

    def test_mixed(self):
        with pytest.raises(MixedKinds):
            aggregate([IntValue(1), CategoryValue("x")], "int")


class TestSchema:
    def test_needs_a_target(self):
        with pytest.raises(NoTarget):
            Schema.of([Attribute("a", "int"), Attribute("b", "int")])

    def test_only_one_target(self):
        with pytest.raises(NoTarget):
            Schema.of([Attribute("a", "int", AttributeRole.TARGET),
                       Attribute("b", "int", AttributeRole.TARGET)])

    def test_schema_survives_in_annotations(self, insulin_engine):
        reopened = TabularEngine(insulin_engine.mesh)
        assert reopened.schema == insulin_engine.schema

    def test_empty_mesh_predicts_nothing(self, insulin_schema):
        engine = make_engine(insulin_schema)
        with pytest.raises(NoEvidence):
            engine.predict(query("6-Jun", "11:00", insulin_schema))
