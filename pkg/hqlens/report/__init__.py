"""
Analysis artifacts: indicator table, platform distribution, score map.
"""

from .distribution import PlatformDistribution, platform_distribution
from .geojson import export_geojson
from .tables import INDICATOR_COLUMNS, indicator_table

__all__ = [
    "INDICATOR_COLUMNS",
    "PlatformDistribution",
    "export_geojson",
    "indicator_table",
    "platform_distribution",
]
