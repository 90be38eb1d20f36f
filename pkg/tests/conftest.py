"""Shared fixtures: data files, schemas, records and trained engines."""

from __future__ import annotations

from pathlib import Path

import pytest

from src.data.csv_ingest import ingest_csv
from src.data.schema_file import load_schema
from src.mesh.mesh import Mesh
from src.service.tabular import Schema, TabularEngine

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
IMAGE_DIR = DATA_DIR / "images"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def image_dir() -> Path:
    return IMAGE_DIR


@pytest.fixture(scope="session")
def insulin_schema() -> Schema:
    return load_schema(DATA_DIR / "insulin.schema")


@pytest.fixture(scope="session")
def insulin_records(insulin_schema):
    return ingest_csv(DATA_DIR / "insulin.csv", insulin_schema)


@pytest.fixture(scope="session")
def iris_schema() -> Schema:
    return load_schema(DATA_DIR / "iris.schema")


@pytest.fixture(scope="session")
def iris_records(iris_schema):
    return ingest_csv(DATA_DIR / "iris.csv", iris_schema)


def make_engine(schema: Schema, records=()) -> TabularEngine:
    engine = TabularEngine(Mesh())
    engine.define_schema(schema)
    engine.train(records)
    return engine


@pytest.fixture
def insulin_engine(insulin_schema, insulin_records) -> TabularEngine:
    """Trained on records 1–10."""
    return make_engine(insulin_schema, insulin_records[:10])


@pytest.fixture
def iris_without_35(iris_schema, iris_records) -> TabularEngine:
    return make_engine(iris_schema, iris_records[:34] + iris_records[35:])
