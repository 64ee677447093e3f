"""
Accuracy harness comparing extraction backends with gold annotations.
"""

from .alignment import Alignment, MatchLevel, UnitMatch, align_units
from .compare import BackendColumn, ComparisonTable, compare_backends
from .gold import GoldAnnotation, load_gold
from .metrics import METRIC_NAMES, ConfusionMatrix, MetricsReport, compute_metrics

__all__ = [
    "METRIC_NAMES",
    "Alignment",
    "BackendColumn",
    "ComparisonTable",
    "ConfusionMatrix",
    "GoldAnnotation",
    "MatchLevel",
    "MetricsReport",
    "UnitMatch",
    "align_units",
    "compare_backends",
    "compute_metrics",
    "load_gold",
]
