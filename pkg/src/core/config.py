"""
YAML configuration loader for Meshnet.

Each section of ``config.yaml`` maps onto one dataclass:

  - ``engine``: weight law, nearest-k, rounding, image threshold
  - ``prior``: ranges of the prior-knowledge number systems
  - ``evaluation``: leave-one-out worker pool
  - ``logging``: level and log file

Missing file or missing sections fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from decimal import ROUND_HALF_EVEN, ROUND_HALF_UP, Decimal, InvalidOperation
from pathlib import Path
from typing import Any

import yaml

from src.core.errors import ConfigError

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent

# decimal module names; ROUND_HALF_UP rounds half away from zero
_ROUNDING_MODES = {
    "half-away-from-zero": ROUND_HALF_UP,
    "half-even": ROUND_HALF_EVEN,
}


def _as_decimal(value: Any, key: str) -> Decimal:
    """Convert a YAML scalar to an exact Decimal via its string form."""
    try:
        return Decimal(str(value))
    except InvalidOperation as e:
        raise ConfigError(f"{key}: not a number: {value!r}") from e


# ── Section configs ──────────────────────────────────────────────────────

@dataclass
class EngineConfig:
    """Weight law and retrieval knobs shared by every mesh."""
    weight_initial: Decimal = Decimal("1.0")
    weight_decrement: Decimal = Decimal("0.25")
    weight_floor: Decimal = Decimal("0.0")
    nearest_k: int = 1
    rounding: str = "half-away-from-zero"
    image_threshold: int = 128            # strict < threshold → foreground

    def __post_init__(self) -> None:
        self.weight_initial = _as_decimal(self.weight_initial, "weight_initial")
        self.weight_decrement = _as_decimal(self.weight_decrement, "weight_decrement")
        self.weight_floor = _as_decimal(self.weight_floor, "weight_floor")
        self.validate()

    def validate(self) -> None:
        if not self.weight_initial > self.weight_floor >= 0:
            raise ConfigError(
                f"need weight_initial > weight_floor >= 0, got "
                f"{self.weight_initial} / {self.weight_floor}"
            )
        if self.weight_decrement < 0:
            raise ConfigError("weight_decrement must be >= 0")
        if self.nearest_k < 1:
            raise ConfigError(f"nearest_k must be >= 1, got {self.nearest_k}")
        if self.rounding not in _ROUNDING_MODES:
            available = ", ".join(sorted(_ROUNDING_MODES))
            raise ConfigError(
                f"Unknown rounding {self.rounding!r}. Available: {available}"
            )
        if not 0 <= self.image_threshold <= 255:
            raise ConfigError("image_threshold must be within 0..255")

    @property
    def rounding_mode(self) -> str:
        return _ROUNDING_MODES[self.rounding]

    def to_dict(self) -> dict[str, Any]:
        return {
            "weight_initial": str(self.weight_initial),
            "weight_decrement": str(self.weight_decrement),
            "weight_floor": str(self.weight_floor),
            "nearest_k": self.nearest_k,
            "rounding": self.rounding,
            "image_threshold": self.image_threshold,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> EngineConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown engine keys: {', '.join(sorted(unknown))}")
        return cls(**raw)


@dataclass
class PriorConfig:
    """Ranges for the prior-knowledge number systems."""
    integer_min: int = 0
    integer_max: int = 59                 # covers minute links 0..59
    decimal_min: str = "0.1"
    decimal_max: str = "7.9"
    decimal_step: str = "0.1"


@dataclass
class EvaluationConfig:
    workers: int = 1                      # >1 runs folds in a thread pool


@dataclass
class LoggingConfig:
    level: str = "INFO"
    file: str = "meshnet_debug.log"


@dataclass
class AppConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    prior: PriorConfig = field(default_factory=PriorConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


# ── Loader ───────────────────────────────────────────────────────────────

def _section(raw: dict[str, Any], name: str, cls: type) -> Any:
    """Build one section dataclass, rejecting unknown keys."""
    data = raw.get(name) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"section {name!r}: {e}") from e


def load_config(path: Path | str | None = None) -> AppConfig:
    """Load configuration from YAML file, falling back to defaults."""
    config_path = Path(path) if path else PROJECT_ROOT / "config.yaml"
    cfg = AppConfig()

    if not config_path.exists():
        if path:
            raise ConfigError(f"config file not found: {config_path}")
        return cfg

    with open(config_path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    if "engine" in raw:
        cfg.engine = _section(raw, "engine", EngineConfig)
    if "prior" in raw:
        cfg.prior = _section(raw, "prior", PriorConfig)
    if "evaluation" in raw:
        cfg.evaluation = _section(raw, "evaluation", EvaluationConfig)
    if "logging" in raw:
        cfg.logging = _section(raw, "logging", LoggingConfig)

    # Resolve paths
    cfg.logging.file = str(PROJECT_ROOT / cfg.logging.file)

    return cfg
