from __future__ import annotations

from decimal import Decimal

import pytest

from src.core.errors import TooFewRecords
from src.mesh.mesh import Mesh
from src.service.tabular import evaluate_loo

from tests.oracle import day_axis, leave_one_out, minute_axis

IRIS_INPUTS = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
IRIS_AXES = {name: Decimal for name in IRIS_INPUTS}


def as_text(records) -> list[dict[str, str]]:
    return [{k: v.text() for k, v in r.items()} for r in records]


@pytest.fixture(scope="module")
def iris_report(iris_schema, iris_records):
    return evaluate_loo(Mesh(), iris_schema, iris_records)


class TestLeaveOneOut:
    def test_matches_brute_force(self, iris_report, iris_records):
        expected = leave_one_out(as_text(iris_records), IRIS_INPUTS, "species", IRIS_AXES)
        assert [f.predicted for f in iris_report.folds] == expected

    def test_known_folds(self, iris_report):
        assert iris_report.folds[34].predicted == "setosa"
        assert iris_report.folds[93].predicted == "versicolor"
        assert [f.index for f in iris_report.folds] == list(range(1, 151))

    def test_accuracy_is_share_of_correct_folds(self, iris_report):
        right = sum(1 for f in iris_report.folds if f.correct)
        assert iris_report.accuracy == Decimal(right) / Decimal(150)
        assert iris_report.mean_absolute_error is None

    def test_numeric_target(self, insulin_schema, insulin_records):
        report = evaluate_loo(Mesh(), insulin_schema, insulin_records[:10])
        assert report.numeric
        errors = [f for f in report.folds if f.predicted is not None]
        assert all(f.abs_error is not None for f in errors)
        assert report.mean_absolute_error is not None

    def test_insulin_agrees_with_brute_force(self, insulin_schema, insulin_records):
        report = evaluate_loo(Mesh(), insulin_schema, insulin_records)
        expected = leave_one_out(as_text(insulin_records), ["date", "time"], "insulin",
                                 {"date": day_axis, "time": minute_axis}, numeric_target=True)
        assert [f.predicted for f in report.folds] == expected

    def test_template_is_untouched(self, iris_schema, iris_records):
        template = Mesh()
        evaluate_loo(template, iris_schema, iris_records[:5])
        assert template.stats() == {"subnets": 0, "neurons": 0, "connections": 0}

    def test_too_few_records(self, iris_schema, iris_records):
        with pytest.raises(TooFewRecords):
            evaluate_loo(Mesh(), iris_schema, iris_records[:1])

    def test_thread_pool_gives_same_report(self, insulin_schema, insulin_records):
        sequential = evaluate_loo(Mesh(), insulin_schema, insulin_records[:12])
        pooled = evaluate_loo(Mesh(), insulin_schema, insulin_records[:12], workers=2)
        assert pooled.to_dict() == sequential.to_dict()
