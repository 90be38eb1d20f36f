"""
Leave-one-out evaluation: every record is held out once, a fresh mesh is
trained on the rest, and the held-out target is predicted.

Folds are independent (each clones the template mesh), so they may run
in a thread pool; results are always reported in fold order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from typing import Any

from src.core.config import PriorConfig
from src.core.errors import NoEvidence, TooFewRecords
from src.mesh.mesh import Mesh
from src.mesh.values import axis_of
from src.service.tabular.engine import TabularEngine, is_numeric_kind
from src.service.tabular.schema import Record, Schema
from src.service.tabular.trace import decimal_text

log = logging.getLogger(__name__)


@dataclass
class FoldResult:
    index: int                         # 1-based record position
    expected: str
    predicted: str | None = None
    correct: bool | None = None
    abs_error: str | None = None       # numeric targets only
    error: str | None = None


@dataclass
class LooReport:
    target: str
    numeric: bool
    folds: list[FoldResult] = field(default_factory=list)

    @property
    def predicted_folds(self) -> list[FoldResult]:
        return [f for f in self.folds if f.predicted is not None]

    @property
    def accuracy(self) -> Decimal | None:
        """Share of folds predicted exactly (folds without evidence count as wrong)."""
        if not self.folds:
            return None
        right = sum(1 for f in self.folds if f.correct)
        return Decimal(right) / Decimal(len(self.folds))

    @property
    def mean_absolute_error(self) -> Decimal | None:
        errors = [Decimal(f.abs_error) for f in self.folds if f.abs_error is not None]
        if not self.numeric or not errors:
            return None
        return sum(errors, Decimal(0)) / Decimal(len(errors))

    def to_dict(self) -> dict[str, Any]:
        accuracy = self.accuracy
        mae = self.mean_absolute_error
        return {
            "target": self.target,
            "folds": [asdict(f) for f in self.folds],
            "accuracy": None if accuracy is None else decimal_text(accuracy.quantize(Decimal("0.0001"))),
            "mean_absolute_error": None if mae is None else decimal_text(mae.quantize(Decimal("0.0001"))),
        }


def _fold(base: Mesh, schema: Schema, records: list[Record], held: int) -> FoldResult:
    target = schema.target.name
    expected = records[held][target]
    result = FoldResult(index=held + 1, expected=expected.text())

    engine = TabularEngine(base.clone(), schema)
    for i, record in enumerate(records):
        if i != held:
            engine.train_record(record)

    partial = {k: v for k, v in records[held].items() if k != target}
    try:
        predicted = engine.predict(partial).value
    except NoEvidence as e:
        result.error = str(e)
        result.correct = False
        return result

    result.predicted = predicted.text()
    result.correct = predicted == expected
    if is_numeric_kind(schema.target.kind):
        result.abs_error = decimal_text(abs(axis_of(predicted) - axis_of(expected)))
    return result


def evaluate_loo(
    template: Mesh,
    schema: Schema,
    records: list[Record],
    workers: int = 1,
    prior_cfg: PriorConfig | None = None,
) -> LooReport:
    """
    Run one fold per record. *template* is an untrained mesh; it is never
    modified. Schema subnets and prior knowledge are built once and cloned
    into every fold.
    """
    if len(records) < 2:
        raise TooFewRecords(f"leave-one-out needs >= 2 records, got {len(records)}")
    for record in records:
        schema.check_record(record, complete=True)

    base = template.clone()
    if "schema" not in base.annotations:
        TabularEngine(base, prior_cfg=prior_cfg).define_schema(schema)

    indices = range(len(records))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            folds = list(pool.map(lambda i: _fold(base, schema, records, i), indices))
    else:
        folds = [_fold(base, schema, records, i) for i in indices]

    report = LooReport(schema.target.name, is_numeric_kind(schema.target.kind), folds)
    log.info("Leave-one-out over %d records: accuracy %s",
             len(folds), report.to_dict()["accuracy"])
    return report
