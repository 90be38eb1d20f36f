"""
Prediction traces: every anchor, candidate set, vote and adjustment that
led to a predicted value, with neuron ids so the result can be re-checked
against the mesh.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from decimal import Decimal
from typing import Any

import yaml

from src.mesh.values import Value


@dataclass
class AnchorTrace:
    attribute: str
    value: str                       # query value text
    neuron: int
    neuron_value: str
    exact: bool
    distance: str                    # decimal text, "0" when exact
    rank: int = 1                    # 1 = nearest, >1 only with nearest_k > 1


@dataclass
class VoteTrace:
    anchor_attribute: str
    anchor: int
    other_attribute: str
    candidates: list[int] = field(default_factory=list)
    selected: int | None = None
    selected_value: str | None = None
    shared_targets: list[int] = field(default_factory=list)
    vote: int | None = None
    vote_value: str | None = None
    skipped: str | None = None       # reason when no vote was cast


@dataclass
class AnchorResult:
    attribute: str
    anchor: int
    votes: list[int] = field(default_factory=list)
    result: int | None = None
    result_value: str | None = None


@dataclass
class BiasApplied:
    tag: str
    adjustment: str


@dataclass
class PredictionTrace:
    target: str
    anchors: list[AnchorTrace] = field(default_factory=list)
    votes: list[VoteTrace] = field(default_factory=list)
    results: list[AnchorResult] = field(default_factory=list)
    aggregated: list[str] = field(default_factory=list)
    unbiased: str | None = None
    bias: list[BiasApplied] = field(default_factory=list)
    final: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def render(self) -> str:
        """YAML text of the whole trace, in recording order."""
        return yaml.safe_dump(self.to_dict(), sort_keys=False, allow_unicode=True)


@dataclass
class Prediction:
    value: Value
    trace: PredictionTrace

    @property
    def text(self) -> str:
        return self.value.text()


def decimal_text(d: Decimal) -> str:
    """Plain decimal text without exponent (``Decimal('1E+1')`` → ``10``)."""
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"
