from __future__ import annotations

import pytest

from src.core.config import PriorConfig
from src.core.errors import InvalidRange, MissingPriorSubnet
from src.data.schema_file import parse_schema_text
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef, SubnetRef, SubnetRole
from src.mesh.values import CategoryValue, DecValue, IntValue, MonthValue, TimeValue
from src.service.prior import (
    PriorCatalog,
    build_catalog,
    build_decimal_subnet,
    build_integer_subnet,
    build_month_subnet,
    decimal_grid,
    ensure_decimal,
    ensure_integer,
    link_neuron_to_prior,
    link_prior,
)
from src.service.prior.builders import HOUR, LESS_THAN, MINUTE
from src.service.tabular import TabularEngine


def _labelled(mesh: Mesh, label: str) -> list:
    return [c for c in mesh.connections.values() if label in c.labels]


@pytest.fixture
def catalog_mesh() -> tuple[Mesh, PriorCatalog]:
    mesh = Mesh()
    return mesh, build_catalog(mesh, ["date-dm", "time-hm", "int"])


class TestIntegers:
    @pytest.mark.parametrize("hi", [0, 5, 12, 30])
    def test_range_sizes(self, hi):
        mesh = Mesh()
        sid = build_integer_subnet(mesh, 0, hi)
        assert len(mesh.subnet(sid)) == hi + 1
        assert len(_labelled(mesh, LESS_THAN)) == hi

    def test_chain_points_upwards(self):
        mesh = Mesh()
        sid = build_integer_subnet(mesh, 0, 3)
        two = mesh.find_neuron(sid, IntValue(2))
        three = mesh.find_neuron(sid, IntValue(3))
        conn = mesh.connection_between([NeuronRef(two), NeuronRef(three)], {LESS_THAN})
        assert conn.directed
        assert conn.endpoints == (NeuronRef(two), NeuronRef(three))

    def test_digit_parts(self):
        mesh = Mesh()
        sid = build_integer_subnet(mesh, 0, 12)
        ten = mesh.find_neuron(sid, IntValue(10))
        one = mesh.find_neuron(sid, IntValue(1))
        zero = mesh.find_neuron(sid, IntValue(0))
        assert mesh.connection_between([NeuronRef(one), NeuronRef(ten)], {"part 1 of 2"})
        assert mesh.connection_between([NeuronRef(zero), NeuronRef(ten)], {"part 2 of 2"})
        # 11 uses the digit 1 twice, once per position
        eleven = mesh.find_neuron(sid, IntValue(11))
        labels = {label for c in mesh.connections_of(NeuronRef(eleven))
                  if NeuronRef(one) in c.endpoints for label in c.labels}
        assert labels == {"part 1 of 2", "part 2 of 2"}

    def test_empty_range(self):
        with pytest.raises(InvalidRange):
            build_integer_subnet(Mesh(), 5, 4)

    def test_rebuild_adds_nothing(self):
        mesh = Mesh()
        build_integer_subnet(mesh, 0, 20)
        before = mesh.stats()
        build_integer_subnet(mesh, 0, 20)
        assert mesh.stats()["neurons"] == before["neurons"]

    def test_ensure_integer_grows_contiguously(self):
        mesh = Mesh()
        sid = build_integer_subnet(mesh, 0, 5)
        ensure_integer(mesh, sid, 8)
        assert sorted(n.payload.i for n in mesh.members(sid)) == list(range(0, 9))
        assert len(_labelled(mesh, LESS_THAN)) == 8


class TestOtherSystems:
    def test_decimal_grid(self):
        mesh = Mesh()
        step = DecValue.of("0.1", 1)
        sid = build_decimal_subnet(mesh, DecValue.of("0.1", 1), DecValue.of("7.9", 1), step)
        assert len(mesh.subnet(sid)) == 79
        assert len(_labelled(mesh, LESS_THAN)) == 78
        assert mesh.find_neuron(sid, DecValue.of("4.9", 1)) is not None

    @pytest.mark.parametrize("lo,hi,step", [("1.0", "0.5", "0.1"), ("0.1", "1.0", "0.0")])
    def test_decimal_bad_range(self, lo, hi, step):
        with pytest.raises(InvalidRange):
            build_decimal_subnet(Mesh(), DecValue.of(lo, 1), DecValue.of(hi, 1),
                                 DecValue.of(step, 1))

    def test_month_cycle(self):
        mesh = Mesh()
        sid = build_month_subnet(mesh)
        dec = mesh.find_neuron(sid, MonthValue(12))
        jan = mesh.find_neuron(sid, MonthValue(1))
        assert len(mesh.subnet(sid)) == 12
        assert mesh.connection_between([NeuronRef(dec), NeuronRef(jan)], {"next"})
        assert len(_labelled(mesh, "next")) == 12


class TestLinking:
    def test_month_numbers(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        for i in range(1, 13):
            month = mesh.find_neuron(catalog.month_subnet, MonthValue(i))
            number = mesh.find_neuron(catalog.integer_subnet, IntValue(i))
            assert mesh.connection_between(
                [NeuronRef(month), NeuronRef(number)], {"month number"})

    def test_hour_and_minute(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        hour = mesh.find_neuron(catalog.time_subnet, HOUR)
        minute = mesh.find_neuron(catalog.time_subnet, MINUTE)
        hour_links = [c for c in mesh.connections_of(NeuronRef(hour)) if "hour" in c.labels]
        minute_links = [c for c in mesh.connections_of(NeuronRef(minute))
                        if "minute" in c.labels]
        assert len(hour_links) == 24
        assert len(minute_links) == 60
        assert mesh.find_neuron(catalog.integer_subnet, IntValue(24)) is not None

    def test_operators_link_to_prior_subnets(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        for op in catalog.operator_subnets():
            assert mesh.subnet(op).role is SubnetRole.OPERATOR
            for prior in catalog.prior_subnets():
                assert mesh.connection_between(
                    [SubnetRef(op), SubnetRef(prior)], {"operates on"})

    def test_relinking_only_counts_occurrences(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        before = len(mesh.connections)
        link_prior(mesh, catalog)
        assert len(mesh.connections) == before
        month = mesh.find_neuron(catalog.month_subnet, MonthValue(3))
        number = mesh.find_neuron(catalog.integer_subnet, IntValue(3))
        conn = mesh.connection_between([NeuronRef(month), NeuronRef(number)], {"month number"})
        assert conn.occurrences == 2

    def test_missing_integers(self):
        mesh = Mesh()
        catalog = PriorCatalog(month_subnet=build_month_subnet(mesh))
        with pytest.raises(MissingPriorSubnet):
            link_prior(mesh, catalog)

    def test_catalog_recovered_from_routes(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        assert PriorCatalog.from_mesh(mesh) == catalog

    def test_time_neuron_links(self, catalog_mesh):
        mesh, catalog = catalog_mesh
        sid = mesh.create_subnet("time", SubnetRole.ATTRIBUTE)
        on_the_hour, _ = mesh.insert_value(sid, TimeValue(11, 0))
        half_past, _ = mesh.insert_value(sid, TimeValue(11, 30))
        assert link_neuron_to_prior(mesh, on_the_hour, catalog) == 2
        assert link_neuron_to_prior(mesh, half_past, catalog) == 4
        thirty = mesh.find_neuron(catalog.integer_subnet, IntValue(30))
        assert mesh.connection_between([NeuronRef(half_past), NeuronRef(thirty)], {"minute"})


class TestDecimals:
    @staticmethod
    def _values(mesh: Mesh, sid: int) -> list[str]:
        return sorted((n.payload for n in mesh.members(sid)), key=lambda v: v.scaled)

    def test_grid_follows_precision(self):
        assert [v.text() for v in decimal_grid(PriorConfig(), 0)] == ["1", "7", "1"]
        assert [v.text() for v in decimal_grid(PriorConfig(), 1)] == ["0.1", "7.9", "0.1"]
        assert [v.text() for v in decimal_grid(PriorConfig(), 2)] == ["0.10", "7.90", "0.10"]

    def test_whole_number_schema(self):
        engine = TabularEngine(Mesh())
        engine.define_schema(parse_schema_text("x:dec0:input\ny:int:target"))
        sid = engine.catalog.decimal_subnets[0]
        assert [v.text() for v in self._values(engine.mesh, sid)] == [str(i) for i in range(1, 8)]

    def test_one_grid_per_precision(self):
        mesh = Mesh()
        catalog = build_catalog(mesh, ["dec1", "dec2", "cat"])
        assert sorted(catalog.decimal_subnets) == [1, 2]
        assert len(mesh.subnet(catalog.decimal_subnets[2])) == 79
        assert PriorCatalog.from_mesh(mesh) == catalog

        sid = mesh.create_subnet("width", SubnetRole.ATTRIBUTE)
        nid, _ = mesh.insert_value(sid, DecValue.of("4.90", 2))
        link_neuron_to_prior(mesh, nid, catalog)
        prior = mesh.find_neuron(catalog.decimal_subnets[2], DecValue.of("4.90", 2))
        assert mesh.connection_between([NeuronRef(nid), NeuronRef(prior)], {"value"})

    def test_ensure_decimal_grows_both_ways(self):
        mesh = Mesh()
        sid = build_decimal_subnet(mesh, DecValue.of("0.1", 1), DecValue.of("1.0", 1),
                                   DecValue.of("0.1", 1))
        ensure_decimal(mesh, sid, DecValue.of("1.3", 1))
        ensure_decimal(mesh, sid, DecValue.of("-0.1", 1))
        texts = [v.text() for v in self._values(mesh, sid)]
        assert texts[0] == "-0.1" and texts[-1] == "1.3"
        assert len(texts) == 15
        assert len(_labelled(mesh, LESS_THAN)) == 14
        mesh.check_integrity()

    def test_off_grid_value_sits_between_neighbours(self):
        mesh = Mesh()
        step = DecValue.of("0.2", 1)
        sid = build_decimal_subnet(mesh, DecValue.of("0.2", 1), DecValue.of("0.6", 1), step)
        half = ensure_decimal(mesh, sid, DecValue.of("0.5", 1))
        below = mesh.find_neuron(sid, DecValue.of("0.4", 1))
        above = mesh.find_neuron(sid, DecValue.of("0.6", 1))
        assert mesh.connection_between([NeuronRef(below), NeuronRef(half)], {LESS_THAN})
        assert mesh.connection_between([NeuronRef(half), NeuronRef(above)], {LESS_THAN})

    def test_trained_value_outside_grid_is_linked(self):
        engine = TabularEngine(Mesh())
        engine.define_schema(parse_schema_text("x:dec1:input\ny:cat:target"))
        engine.train_record({"x": DecValue.of("9.5", 1), "y": CategoryValue("high")})
        mesh = engine.mesh
        nid = mesh.find_neuron(mesh.route("x"), DecValue.of("9.5", 1))
        assert any("value" in c.labels for c in mesh.connections_of(NeuronRef(nid)))
        grid = engine.catalog.decimal_subnets[1]
        assert mesh.find_neuron(grid, DecValue.of("8.0", 1)) is not None
