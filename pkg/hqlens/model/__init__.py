"""
Shared domain types: posts, evaluation units, the indicator taxonomy and
residential communities.
"""

from .community import Community, LatLon
from .entry import Entry, GeoHint
from .platform import Platform
from .taxonomy import (
    Category,
    Indicator,
    Taxonomy,
    default_taxonomy_path,
    load_taxonomy,
)
from .unit import EvaluationUnit, IndicatorId, SentimentScore, validate_unit

__all__ = [
    "Category",
    "Community",
    "Entry",
    "EvaluationUnit",
    "GeoHint",
    "Indicator",
    "IndicatorId",
    "LatLon",
    "Platform",
    "SentimentScore",
    "Taxonomy",
    "default_taxonomy_path",
    "load_taxonomy",
    "validate_unit",
]
