"""
Command handlers — one function per CLI subcommand.

Each handler loads what it needs (config, mesh archive, data files),
drives the engines, writes results to standard output and returns an
exit code. Errors propagate as ``MeshError`` subclasses; ``app.main``
maps them to exit codes.
"""

from __future__ import annotations

import argparse
import logging

import yaml

from src.core.config import AppConfig
from src.core.errors import UnknownAttribute, UsageError
from src.data.csv_ingest import ingest_csv
from src.data.dot_export import export_dot
from src.data.schema_file import load_schema
from src.db.archive import load_mesh, save_mesh
from src.mesh.mesh import Mesh
from src.mesh.model import NeuronRef
from src.mesh.values import parse_value
from src.service.image import ImageEngine, image_to_subnet, load_grid
from src.service.tabular import BiasRule, Schema, TabularEngine, evaluate_loo

log = logging.getLogger(__name__)


# ── helpers ──────────────────────────────────────────────────────────────

def parse_assignments(text: str) -> dict[str, str]:
    """``"date=6-Jun,time=11:00"`` → ``{"date": "6-Jun", "time": "11:00"}``."""
    fields: dict[str, str] = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"expected name=value, got {part!r}")
        fields[key.strip()] = value.strip()
    return fields


def _split_tags(text: str | None) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


def _tabular(mesh: Mesh, cfg: AppConfig) -> TabularEngine:
    engine = TabularEngine(mesh, prior_cfg=cfg.prior)
    if engine.schema is None:
        raise UsageError("mesh has no schema; create it with `init --schema`")
    return engine


def _partial(schema: Schema, fields: dict[str, str]) -> dict:
    for name in fields:
        if name not in schema.names:
            raise UnknownAttribute(f"no attribute {name!r} in schema")
    return schema.parse_record(fields, complete=False)


# ── tabular ──────────────────────────────────────────────────────────────

def cmd_init(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = Mesh(cfg.engine)
    if args.schema:
        TabularEngine(mesh, prior_cfg=cfg.prior).define_schema(load_schema(args.schema))
    save_mesh(mesh, args.out)
    print(_stats_line(mesh))
    return 0


def cmd_train(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    engine = _tabular(mesh, cfg)
    report = engine.train(ingest_csv(args.data, engine.schema))
    save_mesh(mesh, args.mesh)
    print(f"neurons created: {report.neurons_created}, "
          f"connections created: {report.connections_created}, "
          f"connections updated: {report.connections_updated}")
    return 0


def cmd_predict(args: argparse.Namespace, cfg: AppConfig) -> int:
    engine = _tabular(load_mesh(args.mesh), cfg)
    partial = _partial(engine.schema, parse_assignments(args.input))
    prediction = engine.predict(partial, _split_tags(args.bias))
    print(prediction.text)
    if args.trace:
        print(prediction.trace.render(), end="")
    return 0


def cmd_confirm(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    engine = _tabular(mesh, cfg)
    record = _partial(engine.schema, parse_assignments(args.input))
    target = engine.schema.target
    record[target.name] = parse_value(target.kind, args.target)
    report = engine.confirm(record)
    save_mesh(mesh, args.mesh)
    print(f"neurons created: {report.neurons_created}, "
          f"connections updated: {report.connections_updated}")
    return 0


def cmd_bias(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    engine = _tabular(mesh, cfg)
    if args.tag:
        engine.add_bias_rule(BiasRule(args.tag, args.adjustment))
        save_mesh(mesh, args.mesh)
    for tag, adjustment in engine.bias_rules().items():
        print(f"{tag}\t{adjustment:+f}")
    return 0


def cmd_evaluate(args: argparse.Namespace, cfg: AppConfig) -> int:
    if args.mode != "loo":
        raise UsageError(f"unknown evaluation mode {args.mode!r}")
    template = load_mesh(args.mesh_template) if args.mesh_template else Mesh(cfg.engine)
    engine = TabularEngine(template, prior_cfg=cfg.prior)
    schema = load_schema(args.schema) if args.schema else engine.schema
    if schema is None:
        raise UsageError("evaluate needs --schema or a template mesh with a schema")
    if engine.schema is not None and len(template.subnet(engine.target_subnet)):
        raise UsageError("template mesh already holds training records")

    records = ingest_csv(args.data, schema)
    report = evaluate_loo(template, schema, records,
                          workers=cfg.evaluation.workers, prior_cfg=cfg.prior)
    print("fold\texpected\tpredicted\tcorrect")
    for f in report.folds:
        predicted = f.predicted if f.predicted is not None else "-"
        print(f"{f.index}\t{f.expected}\t{predicted}\t{'yes' if f.correct else 'no'}")
    summary = report.to_dict()
    print(f"accuracy: {summary['accuracy']}")
    if summary["mean_absolute_error"] is not None:
        print(f"mean absolute error: {summary['mean_absolute_error']}")
    return 0


# ── image ────────────────────────────────────────────────────────────────

def cmd_image_register(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    engine = ImageEngine(mesh)
    sid = engine.register_labeled_image(engine.model(), load_grid(args.file, args.format),
                                        args.label, keep_background=args.keep_background)
    save_mesh(mesh, args.mesh)
    print(mesh.subnet(sid).name)
    return 0


def cmd_image_classify(args: argparse.Namespace, cfg: AppConfig) -> int:
    engine = ImageEngine(load_mesh(args.mesh))
    result = engine.classify(engine.model(), load_grid(args.file, args.format),
                             keep_background=args.keep_background)
    print(result.label)
    if args.trace:
        print(yaml.safe_dump(result.to_dict(), sort_keys=False), end="")
    return 0


def cmd_image_unit(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    sid = ImageEngine(mesh).build_unit_subnet(args.name, args.pixels)
    save_mesh(mesh, args.mesh)
    print(mesh.subnet(sid).name)
    return 0


def cmd_image_measure(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    unit = mesh.route(f"unit:{args.unit}")
    # measure on a copy so the archive is untouched
    work = mesh.clone()
    engine = ImageEngine(work)
    shape = image_to_subnet(work, engine.prepare(load_grid(args.file, args.format)), "measured")
    print(f"{engine.measure_extent(shape, unit)} {args.unit}")
    return 0


# ── export / inspect ─────────────────────────────────────────────────────

def cmd_export(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    if args.format == "dot":
        export_dot(mesh, args.out, args.subnet)
    else:
        save_mesh(mesh, args.out)
    return 0


def cmd_inspect(args: argparse.Namespace, cfg: AppConfig) -> int:
    mesh = load_mesh(args.mesh)
    if not args.subnet:
        print(_stats_line(mesh))
        for sid in sorted(mesh.subnets):
            s = mesh.subnets[sid]
            print(f"{sid}\t{s.name}\t{s.role.value}\t{len(s)}")
        return 0
    subnet = mesh.subnet_by_name(args.subnet)
    print(f"subnet {subnet.id} {subnet.name} ({subnet.role.value}), {len(subnet)} neurons")
    for neuron in mesh.members(subnet.id):
        degree = len(mesh.connections_of(NeuronRef(neuron.id)))
        print(f"{neuron.id}\t{neuron.payload.text()}\t{degree}")
    return 0


def _stats_line(mesh: Mesh) -> str:
    stats = mesh.stats()
    return (f"{stats['subnets']} subnets, {stats['neurons']} neurons, "
            f"{stats['connections']} connections")
