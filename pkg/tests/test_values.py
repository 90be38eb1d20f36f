from __future__ import annotations

from decimal import Decimal

import pytest

from src.core.errors import ValueParseError
from src.mesh.values import (
    CategoryValue,
    DateValue,
    DecValue,
    IntValue,
    MonthValue,
    TimeValue,
    distance,
    parse_value,
    value_from_dict,
    value_to_dict,
)


class TestParsing:
    @pytest.mark.parametrize("text", ["6-June", "6-Jun", "6-jun", " 6 - JUNE "])
    def test_dates_accept_full_and_short_months(self, text):
        assert parse_value("date-dm", text) == DateValue(6, 6)

    def test_date_renders_canonical(self):
        assert parse_value("date-dm", "6-June").text() == "6-Jun"

    def test_time(self):
        assert parse_value("time-hm", "08:00") == TimeValue(8, 0)
        assert parse_value("time-hm", "8:05").text() == "08:05"

    @pytest.mark.parametrize("bad", ["25:00", "12:60", "noon"])
    def test_bad_time(self, bad):
        with pytest.raises(ValueParseError):
            parse_value("time-hm", bad)

    def test_decimal_keeps_precision_exact(self):
        v = parse_value("dec1", "4.9")
        assert v == DecValue(49, 1)
        assert v.text() == "4.9"
        assert parse_value("dec1", "5").text() == "5.0"

    def test_decimal_rejects_extra_places(self):
        with pytest.raises(ValueParseError):
            parse_value("dec1", "4.95")

    def test_unknown_kind(self):
        with pytest.raises(ValueParseError):
            parse_value("float", "1.0")


class TestDistance:
    def test_numeric(self):
        assert distance(IntValue(3), IntValue(7)) == Decimal(4)
        assert distance(DecValue(49, 1), DecValue(51, 1)) == Decimal("0.2")

    def test_months_wrap(self):
        assert distance(MonthValue(12), MonthValue(1)) == Decimal(1)

    def test_dates_and_times(self):
        assert distance(DateValue(6, 6), DateValue(5, 6)) == Decimal(1)
        assert distance(DateValue(1, 7), DateValue(30, 6)) == Decimal(1)
        assert distance(TimeValue(11, 0), TimeValue(8, 0)) == Decimal(180)

    def test_no_axis(self):
        assert distance(CategoryValue("a"), CategoryValue("b")) is None
        assert distance(TimeValue(1, 0), DateValue(1, 1)) is None


@pytest.mark.parametrize("value", [
    IntValue(-3), DecValue(49, 1), MonthValue(6), DateValue(6, 6),
    TimeValue(11, 0), CategoryValue("setosa"),
])
def test_archive_form(value):
    assert value_from_dict(value_to_dict(value)) == value
