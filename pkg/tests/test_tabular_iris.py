"""Categorical prediction on the iris measurements."""

from __future__ import annotations

import pytest

from src.core.errors import EmptyIntersection, NotAttributeSubnet
from src.mesh.values import CategoryValue, DecValue

from tests.conftest import make_engine


def dec(text: str) -> DecValue:
    return DecValue.of(text, 1)


def inputs_of(record: dict) -> dict:
    return {k: v for k, v in record.items() if k != "species"}


class TestCensus:
    def test_subnet_sizes(self, iris_schema, iris_records):
        engine = make_engine(iris_schema, iris_records)
        mesh = engine.mesh
        sizes = [len(mesh.subnet(mesh.route(n))) for n in iris_schema.names]
        assert sizes == [35, 23, 43, 22, 3]


class TestHeldOutRecord35:
    def test_candidate_sets(self, iris_without_35):
        engine = iris_without_35
        mesh = engine.mesh
        anchor = mesh.find_neuron(mesh.route("sepal_length"), dec("4.9"))
        sizes = [len(engine.candidate_set(anchor, mesh.route(n), engine.target_subnet))
                 for n in ("sepal_width", "petal_length", "petal_width")]
        assert sizes == [5, 4, 4]

    def test_vote_tie_goes_to_strongest_bond(self, iris_without_35):
        engine = iris_without_35
        mesh = engine.mesh
        anchor = mesh.find_neuron(mesh.route("sepal_length"), dec("4.9"))
        selected = mesh.find_neuron(mesh.route("sepal_width"), dec("3.1"))
        # all three species share both neurons; setosa has the lowest summed weight
        vote = engine.resolve_vote(selected, anchor, engine.target_subnet)
        assert mesh.value(vote) == CategoryValue("setosa")

    def test_prediction(self, iris_without_35, iris_records):
        prediction = iris_without_35.predict(inputs_of(iris_records[34]))
        assert prediction.value == CategoryValue("setosa")

    def test_no_shared_target(self, iris_without_35):
        engine = iris_without_35
        mesh = engine.mesh
        # 0.1 petal width only ever saw setosa, 2.5 only virginica
        narrow = mesh.find_neuron(mesh.route("petal_width"), dec("0.1"))
        wide = mesh.find_neuron(mesh.route("petal_width"), dec("2.5"))
        with pytest.raises(EmptyIntersection):
            engine.resolve_vote(narrow, wide, engine.target_subnet)

    def test_target_is_not_a_candidate_subnet(self, iris_without_35):
        engine = iris_without_35
        mesh = engine.mesh
        anchor = mesh.find_neuron(mesh.route("sepal_length"), dec("4.9"))
        with pytest.raises(NotAttributeSubnet):
            engine.candidate_set(anchor, engine.target_subnet, engine.target_subnet)


def test_held_out_record_94(iris_schema, iris_records):
    engine = make_engine(iris_schema, iris_records[:93] + iris_records[94:])
    assert engine.predict(inputs_of(iris_records[93])).text == "versicolor"
