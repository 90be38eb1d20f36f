"""
Command-line entry — argument parsing, logging setup and dispatch.

Subcommands:
  init      build prior knowledge and the schema subnets into a new mesh
  train     train CSV records into a mesh
  predict   predict the target for one partial record
  confirm   feed a verified record back into the mesh
  bias      add or list bias rules
  evaluate  leave-one-out evaluation over a CSV file
  image     register / classify images, unit priors, measurement
  export    write the mesh as DOT or as an archive
  inspect   list subnets, or the neurons of one subnet

Results go to standard output; logs go to standard error and the log file.
Exit codes: 0 success, 1 data or mesh error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from src.core.config import AppConfig, load_config
from src.core.errors import MeshError, UsageError
from src.orchestrator import commands

log = logging.getLogger(__name__)


def configure_logging(cfg: AppConfig, verbose: bool = False) -> None:
    """Log to both standard error and the configured log file."""
    level = logging.DEBUG if verbose else getattr(logging, cfg.logging.level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[
            logging.FileHandler(cfg.logging.file, encoding="utf-8"),
            logging.StreamHandler(sys.stderr),
        ],
        force=True,
    )


def _add_grid_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mesh", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=["pgm", "palette"], default=None,
                   help="grid format (detected from content by default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshnet", description="Subnet mesh memory")
    parser.add_argument("--config", default=None, help="alternate config.yaml")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a mesh")
    p.add_argument("--schema", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=commands.cmd_init)

    p = sub.add_parser("train", help="train CSV records")
    p.add_argument("--mesh", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(handler=commands.cmd_train)

    p = sub.add_parser("predict", help="predict a target value")
    p.add_argument("--mesh", required=True)
    p.add_argument("--input", required=True, help="name=value,...")
    p.add_argument("--bias", default=None, help="tag,...")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(handler=commands.cmd_predict)

    p = sub.add_parser("confirm", help="store a verified record")
    p.add_argument("--mesh", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(handler=commands.cmd_confirm)

    p = sub.add_parser("bias", help="add or list bias rules")
    p.add_argument("--mesh", required=True)
    p.add_argument("--tag", default=None)
    p.add_argument("--adjustment", default="0")
    p.set_defaults(handler=commands.cmd_bias)

    p = sub.add_parser("evaluate", help="leave-one-out evaluation")
    p.add_argument("--mesh-template", default=None)
    p.add_argument("--schema", default=None)
    p.add_argument("--data", required=True)
    p.add_argument("--mode", default="loo")
    p.set_defaults(handler=commands.cmd_evaluate)

    image = sub.add_parser("image", help="image recognition").add_subparsers(
        dest="image_command", required=True)
    p = image.add_parser("register")
    _add_grid_options(p)
    p.add_argument("--label", required=True)
    p.add_argument("--keep-background", action="store_true")
    p.set_defaults(handler=commands.cmd_image_register)

    p = image.add_parser("classify")
    _add_grid_options(p)
    p.add_argument("--keep-background", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(handler=commands.cmd_image_classify)

    p = image.add_parser("unit")
    p.add_argument("--mesh", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--pixels", type=int, required=True)
    p.set_defaults(handler=commands.cmd_image_unit)

    p = image.add_parser("measure")
    _add_grid_options(p)
    p.add_argument("--unit", required=True)
    p.set_defaults(handler=commands.cmd_image_measure)

    p = sub.add_parser("export", help="write DOT or archive")
    p.add_argument("--mesh", required=True)
    p.add_argument("--format", choices=["dot", "archive"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--subnet", action="append", default=None,
                   help="subnet name to include (repeatable, DOT only)")
    p.set_defaults(handler=commands.cmd_export)

    p = sub.add_parser("inspect", help="show subnets")
    p.add_argument("--mesh", required=True)
    p.add_argument("--subnet", default=None)
    p.set_defaults(handler=commands.cmd_inspect)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        cfg = load_config(args.config)
        configure_logging(cfg, args.verbose)
        return args.handler(args, cfg)
    except UsageError as e:
        log.error("%s", e)
        print(f"[ERROR] {e}", file=sys.stderr)
        return 2
    except (MeshError, OSError) as e:
        log.error("%s failed: %s", args.command, e)
        print(f"[ERROR] {e}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
