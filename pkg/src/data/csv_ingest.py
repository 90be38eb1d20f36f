"""
CSV ingestion into typed records.

The header must name the schema attributes in order; an extra leading
serial column (e.g. ``Sr.#``) is skipped. Rows are parsed with the schema
kinds, and any failure is reported with its 1-based file line.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

import pandas as pd

from src.core.errors import HeaderMismatch, RowParseError, ValueParseError
from src.service.tabular.schema import Record, Schema

log = logging.getLogger(__name__)

_PANDAS_LINE_RE = re.compile(r"line (\d+)")


def _columns(header: list[str], schema: Schema) -> list[str]:
    names = schema.names
    header = [h.strip() for h in header]
    if header == names:
        return header
    if len(header) == len(names) + 1 and header[1:] == names:
        return header[1:]
    raise HeaderMismatch(f"CSV header {header} does not match schema {names}")


def ingest_csv(path: Path | str, schema: Schema) -> list[Record]:
    """Read every row of *path* as a complete record of *schema*."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            skip_blank_lines=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise HeaderMismatch(f"{path}: no header row") from e
    except pd.errors.ParserError as e:
        m = _PANDAS_LINE_RE.search(str(e))
        raise RowParseError(int(m.group(1)) if m else 0, str(e)) from e

    columns = _columns(list(frame.columns), schema)
    records: list[Record] = []
    for offset, row in enumerate(frame[columns].itertuples(index=False, name=None)):
        line = offset + 2                      # header is line 1
        fields = ["" if pd.isna(v) else str(v).strip() for v in row]
        if not any(fields):
            continue
        if not all(fields):
            raise RowParseError(line, "missing field")
        try:
            records.append(schema.parse_record(dict(zip(columns, fields))))
        except ValueParseError as e:
            raise RowParseError(line, str(e)) from e

    log.info("Ingested %d records from %s", len(records), path)
    return records
