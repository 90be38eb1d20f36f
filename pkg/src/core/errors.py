"""
Exception hierarchy for Meshnet.

Every failure raised by the engines derives from ``MeshError`` so the CLI
can map it to an exit code in one place. The grouping bases mirror the
package layout:

  - StructureError: mesh-core (subnets, neurons, connections, routing)
  - PriorError: prior-knowledge builders
  - PredictionError: tabular training / prediction / evaluation
  - ImageError: pixel grids and shape subnets
  - DataError: schema files, CSV, archives
"""

from __future__ import annotations


class MeshError(Exception):
    """Root of all Meshnet errors."""


class ConfigError(MeshError):
    """Invalid configuration value."""


class UsageError(MeshError):
    """Bad command-line usage (exit code 2)."""


# ── mesh-core ────────────────────────────────────────────────────────────

class StructureError(MeshError):
    pass


class DuplicateSubnetName(StructureError):
    pass


class UnknownSubnet(StructureError):
    pass


class UnknownNeuron(StructureError):
    pass


class UnknownConnection(StructureError):
    pass


class UnknownEndpoint(StructureError):
    pass


class ArityTooSmall(StructureError):
    pass


class UnroutableInput(StructureError):
    pass


class IntegrityError(StructureError):
    """A mesh invariant does not hold."""


# ── prior knowledge ──────────────────────────────────────────────────────

class PriorError(MeshError):
    pass


class InvalidRange(PriorError):
    pass


class MissingPriorSubnet(PriorError):
    pass


# ── tabular engine ───────────────────────────────────────────────────────

class PredictionError(MeshError):
    pass


class DuplicateAttribute(PredictionError):
    pass


class NoTarget(PredictionError):
    pass


class UnknownAttribute(PredictionError):
    pass


class SchemaMismatch(PredictionError):
    pass


class NoAxisForCategorical(PredictionError):
    pass


class EmptySubnet(PredictionError):
    pass


class NotAttributeSubnet(PredictionError):
    pass


class NotATargetSubnet(PredictionError):
    pass


class EmptyIntersection(PredictionError):
    pass


class NoEvidence(PredictionError):
    pass


class EmptyVotes(PredictionError):
    pass


class MixedKinds(PredictionError):
    pass


class DuplicateBiasTag(PredictionError):
    pass


class UnknownBiasTag(PredictionError):
    pass


class BiasOnCategorical(PredictionError):
    pass


class TooFewRecords(PredictionError):
    pass


# ── image engine ─────────────────────────────────────────────────────────

class ImageError(MeshError):
    pass


class MalformedImage(ImageError):
    pass


class UnsupportedFormat(ImageError):
    pass


class EmptyImage(ImageError):
    pass


class NotAShapeSubnet(ImageError):
    pass


class EmptyModel(ImageError):
    pass


# ── files ────────────────────────────────────────────────────────────────

class DataError(MeshError):
    pass


class ValueParseError(DataError):
    pass


class HeaderMismatch(DataError):
    pass


class RowParseError(DataError):
    """A CSV row could not be parsed; ``line`` is the 1-based file line."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ArchiveVersionMismatch(DataError):
    pass


class CorruptArchive(DataError):
    pass
