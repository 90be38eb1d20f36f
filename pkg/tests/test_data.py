from __future__ import annotations

import re

import pytest

from src.core.errors import HeaderMismatch, RowParseError, ValueParseError
from src.data.csv_ingest import ingest_csv
from src.data.dot_export import dot_text, export_dot
from src.data.schema_file import parse_schema_text
from src.mesh.mesh import Mesh
from src.mesh.values import DateValue, IntValue, TimeValue
from src.service.prior import build_integer_subnet, build_time_subnet

NODE_RE = re.compile(r"^\s+n\d+ \[label=", re.MULTILINE)


class TestSchemaFiles:
    def test_comments_and_blank_lines(self):
        schema = parse_schema_text("# doses\n\ndate:date-dm:input  # day\ntime:time-hm:input\n"
                                   "insulin:int:target\n")
        assert schema.names == ["date", "time", "insulin"]
        assert schema.target.name == "insulin"

    @pytest.mark.parametrize("text,where", [
        ("a:int\n", "line 1"),
        ("a:int:input\nb:float:target\n", "line 2"),
        ("a:int:output\n", "line 1"),
    ])
    def test_errors_name_the_line(self, text, where):
        with pytest.raises(ValueParseError, match=where):
            parse_schema_text(text)


class TestCsvIngest:
    def test_insulin_file(self, insulin_records):
        assert len(insulin_records) == 30
        assert insulin_records[10] == {"date": DateValue(6, 6), "time": TimeValue(11, 0),
                                       "insulin": IntValue(13)}

    def test_iris_file(self, iris_records):
        assert len(iris_records) == 150
        assert iris_records[34]["species"].text() == "setosa"

    def test_bad_value_reports_file_line(self, insulin_schema, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("date,time,insulin\n1-Jun,08:00,13\n2-Jun,25:00,12\n", encoding="utf-8")
        with pytest.raises(RowParseError) as err:
            ingest_csv(path, insulin_schema)
        assert err.value.line == 3

    def test_missing_field(self, insulin_schema, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("date,time,insulin\n1-Jun,,13\n", encoding="utf-8")
        with pytest.raises(RowParseError, match="line 2"):
            ingest_csv(path, insulin_schema)

    def test_header_must_match(self, insulin_schema, tmp_path):
        path = tmp_path / "swapped.csv"
        path.write_text("time,date,insulin\n08:00,1-Jun,13\n", encoding="utf-8")
        with pytest.raises(HeaderMismatch):
            ingest_csv(path, insulin_schema)


class TestDotExport:
    def test_prior_subnet_only(self):
        mesh = Mesh()
        build_integer_subnet(mesh, 0, 12)
        text = dot_text(mesh, ["integers"])
        assert text.startswith("digraph mesh {")
        assert len(NODE_RE.findall(text)) == 13
        assert '[label="less than (1.0)"];' in text

    def test_scope_limits_edges(self, insulin_engine):
        mesh = insulin_engine.mesh
        text = dot_text(mesh, ["time", "insulin"])
        assert "cluster_s" in text
        assert 'label="If...Then (0.75)"' in text
        assert "date" not in re.findall(r'label="([^"]+) \(attribute\)"', text)

    def test_undirected_edges_have_no_arrowhead(self):
        mesh = Mesh()
        build_time_subnet(mesh)
        assert "dir=none" in dot_text(mesh)

    def test_written_to_file(self, tmp_path):
        mesh = Mesh()
        build_integer_subnet(mesh, 0, 3)
        path = tmp_path / "mesh.dot"
        export_dot(mesh, path)
        assert path.read_text(encoding="utf-8") == dot_text(mesh)
