"""
Typed scalar payloads held by neurons.

Every variant is a frozen dataclass, so equality and hashing are exact on
(variant, payload). Numeric-like variants expose a position on a totally
ordered axis (``axis_of``) used for nearest-value retrieval; categorical
variants have no axis and only match exactly.

Decimals are stored as ``(scaled, precision)`` integers: 4.9 is
``DecValue(49, 1)``. No float ever enters a comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Any, ClassVar, Union

from src.core.errors import ValueParseError

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_MONTH_FULL = ("january", "february", "march", "april", "may", "june",
               "july", "august", "september", "october", "november", "december")
_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)   # non-leap


class ValueKind(str, Enum):
    INTEGER = "int"
    DECIMAL = "dec"
    MONTH = "month"
    DATE_DM = "date-dm"
    TIME_HM = "time-hm"
    CATEGORY = "cat"
    COLOR = "color"
    OPERATOR = "op"
    TOKEN = "token"


# ── Variants ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class IntValue:
    i: int
    kind: ClassVar[ValueKind] = ValueKind.INTEGER

    def text(self) -> str:
        return str(self.i)

    def axis(self) -> Decimal | None:
        return Decimal(self.i)


@dataclass(frozen=True)
class DecValue:
    scaled: int
    precision: int

    kind: ClassVar[ValueKind] = ValueKind.DECIMAL

    def __post_init__(self) -> None:
        if self.precision < 0:
            raise ValueParseError(f"negative precision {self.precision}")

    @classmethod
    def of(cls, text: str | Decimal, precision: int) -> DecValue:
        """Build from decimal text, requiring no more than *precision* places."""
        try:
            d = Decimal(str(text).strip())
        except Exception as e:
            raise ValueParseError(f"not a decimal: {text!r}") from e
        if not d.is_finite():
            raise ValueParseError(f"not a finite decimal: {text!r}")
        scaled = d.scaleb(precision)
        if scaled != scaled.to_integral_value():
            raise ValueParseError(
                f"{text!r} has more than {precision} decimal places"
            )
        return cls(int(scaled), precision)

    def as_decimal(self) -> Decimal:
        return Decimal(self.scaled).scaleb(-self.precision)

    def text(self) -> str:
        if self.precision == 0:
            return str(self.scaled)
        sign = "-" if self.scaled < 0 else ""
        digits = str(abs(self.scaled)).rjust(self.precision + 1, "0")
        return f"{sign}{digits[:-self.precision]}.{digits[-self.precision:]}"

    def axis(self) -> Decimal | None:
        return self.as_decimal()


@dataclass(frozen=True)
class MonthValue:
    index: int                              # 1..12

    kind: ClassVar[ValueKind] = ValueKind.MONTH

    def __post_init__(self) -> None:
        if not 1 <= self.index <= 12:
            raise ValueParseError(f"month out of range: {self.index}")

    def text(self) -> str:
        return MONTHS[self.index - 1]

    def axis(self) -> Decimal | None:
        return Decimal(self.index)


@dataclass(frozen=True)
class DateValue:
    day: int
    month: int

    kind: ClassVar[ValueKind] = ValueKind.DATE_DM

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueParseError(f"month out of range: {self.month}")
        if not 1 <= self.day <= 31:
            raise ValueParseError(f"day out of range: {self.day}")

    def text(self) -> str:
        return f"{self.day}-{MONTHS[self.month - 1]}"

    def axis(self) -> Decimal | None:
        return Decimal(sum(_DAYS_IN_MONTH[: self.month - 1]) + self.day)


@dataclass(frozen=True)
class TimeValue:
    hour: int
    minute: int

    kind: ClassVar[ValueKind] = ValueKind.TIME_HM

    def __post_init__(self) -> None:
        if not (0 <= self.hour <= 23 and 0 <= self.minute <= 59):
            raise ValueParseError(f"invalid time {self.hour}:{self.minute}")

    def text(self) -> str:
        return f"{self.hour:02d}:{self.minute:02d}"

    def axis(self) -> Decimal | None:
        return Decimal(60 * self.hour + self.minute)


@dataclass(frozen=True)
class CategoryValue:
    label: str

    kind: ClassVar[ValueKind] = ValueKind.CATEGORY

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueParseError("empty category")

    def text(self) -> str:
        return self.label

    def axis(self) -> Decimal | None:
        return None


@dataclass(frozen=True)
class ColorValue:
    code: int

    kind: ClassVar[ValueKind] = ValueKind.COLOR

    def __post_init__(self) -> None:
        if self.code < 0:
            raise ValueParseError(f"negative color code {self.code}")

    def text(self) -> str:
        return f"{self.code:02d}"

    def axis(self) -> Decimal | None:
        return None


@dataclass(frozen=True)
class OperatorValue:
    symbol: str

    kind: ClassVar[ValueKind] = ValueKind.OPERATOR

    def text(self) -> str:
        return self.symbol

    def axis(self) -> Decimal | None:
        return None


@dataclass(frozen=True)
class TokenValue:
    token: str

    kind: ClassVar[ValueKind] = ValueKind.TOKEN

    def text(self) -> str:
        return self.token

    def axis(self) -> Decimal | None:
        return None


Value = Union[IntValue, DecValue, MonthValue, DateValue, TimeValue,
              CategoryValue, ColorValue, OperatorValue, TokenValue]

_NUMERIC = (IntValue, DecValue)


def axis_of(v: Value) -> Decimal | None:
    """Position of *v* on its scalar axis, or None for exact-match kinds."""
    return v.axis()


def distance(a: Value, b: Value) -> Decimal | None:
    """
    Absolute axis distance between two values of the same axis family.

    Months wrap around (Dec→Jan is 1). Returns None when either side has
    no axis or the kinds differ.
    """
    if type(a) is not type(b) and not (isinstance(a, _NUMERIC) and isinstance(b, _NUMERIC)):
        return None
    xa, xb = axis_of(a), axis_of(b)
    if xa is None or xb is None:
        return None
    d = abs(xa - xb)
    if isinstance(a, MonthValue):
        d = min(d, 12 - d)
    return d


def is_numeric(v: Value) -> bool:
    return isinstance(v, _NUMERIC)


def sort_key(v: Value) -> tuple:
    """Deterministic ordering across variants (kind, axis or text)."""
    x = axis_of(v)
    return (v.kind.value, x if x is not None else Decimal(0), v.text())


# ── Parsing ──────────────────────────────────────────────────────────────

_DATE_RE = re.compile(r"^\s*(\d{1,2})\s*[-/ ]\s*([A-Za-z]+)\s*$")
_TIME_RE = re.compile(r"^\s*(\d{1,2}):(\d{2})\s*$")
_DEC_KIND_RE = re.compile(r"^dec(\d+)$")


def parse_month(text: str) -> int:
    """Month index from full English name or 3-letter abbreviation."""
    key = text.strip().lower()
    for i, (short, full) in enumerate(zip(MONTHS, _MONTH_FULL), start=1):
        if key == short.lower() or key == full:
            return i
    raise ValueParseError(f"unknown month {text!r}")


def kind_precision(kind: str) -> int | None:
    """Decimal places for a ``decN`` schema kind, None for other kinds."""
    m = _DEC_KIND_RE.match(kind)
    return int(m.group(1)) if m else None


def is_known_kind(kind: str) -> bool:
    return kind in ("int", "date-dm", "time-hm", "cat") or kind_precision(kind) is not None


def parse_value(kind: str, text: str) -> Value:
    """
    Parse *text* according to a schema kind: ``int``, ``decN``,
    ``date-dm``, ``time-hm`` or ``cat``.
    """
    raw = text.strip()
    if kind == "int":
        try:
            return IntValue(int(raw))
        except ValueError as e:
            raise ValueParseError(f"not an integer: {text!r}") from e

    precision = kind_precision(kind)
    if precision is not None:
        return DecValue.of(raw, precision)

    if kind == "date-dm":
        m = _DATE_RE.match(raw)
        if not m:
            raise ValueParseError(f"not a day-month date: {text!r}")
        return DateValue(int(m.group(1)), parse_month(m.group(2)))

    if kind == "time-hm":
        m = _TIME_RE.match(raw)
        if not m:
            raise ValueParseError(f"not an HH:MM time: {text!r}")
        return TimeValue(int(m.group(1)), int(m.group(2)))

    if kind == "cat":
        return CategoryValue(raw)

    raise ValueParseError(f"unknown value kind {kind!r}")


def matches_kind(v: Value, kind: str) -> bool:
    """True when *v* is a value of schema kind *kind*."""
    precision = kind_precision(kind)
    if precision is not None:
        return isinstance(v, DecValue) and v.precision == precision
    return {
        "int": IntValue,
        "date-dm": DateValue,
        "time-hm": TimeValue,
        "cat": CategoryValue,
    }.get(kind) is type(v)


# ── Archive form ─────────────────────────────────────────────────────────

_BY_KIND: dict[str, type] = {
    cls.kind.value: cls
    for cls in (IntValue, DecValue, MonthValue, DateValue, TimeValue,
                CategoryValue, ColorValue, OperatorValue, TokenValue)
}


def value_to_dict(v: Value) -> dict[str, Any]:
    data = dict(v.__dict__)
    data["kind"] = v.kind.value
    return data


def value_from_dict(data: dict[str, Any]) -> Value:
    payload = dict(data)
    cls = _BY_KIND.get(payload.pop("kind", None))
    if cls is None:
        raise ValueParseError(f"unknown value kind in {data!r}")
    try:
        return cls(**payload)
    except TypeError as e:
        raise ValueParseError(f"bad payload {data!r}") from e
