# Tabular prediction — schema, training, prediction, leave-one-out
from src.service.tabular.engine import (
    BiasRule,
    Nearest,
    TabularEngine,
    TrainReport,
    aggregate,
)
from src.service.tabular.evaluation import FoldResult, LooReport, evaluate_loo
from src.service.tabular.schema import Attribute, AttributeRole, Record, Schema
from src.service.tabular.trace import Prediction, PredictionTrace

__all__ = [
    "Attribute",
    "AttributeRole",
    "BiasRule",
    "FoldResult",
    "LooReport",
    "Nearest",
    "Prediction",
    "PredictionTrace",
    "Record",
    "Schema",
    "TabularEngine",
    "TrainReport",
    "aggregate",
    "evaluate_loo",
]
