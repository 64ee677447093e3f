"""
Community boundaries, name matching and entry resolution.
"""

from .communities import (
    CommunityIndex,
    community_area,
    load_communities,
    point_in_community,
    point_in_ring,
    ring_area,
)
from .matching import match_name, normalize_name
from .resolver import (
    Assignment,
    AssignmentMethod,
    CommunityResolver,
    PoiRecord,
    load_pois,
)

__all__ = [
    "Assignment",
    "AssignmentMethod",
    "CommunityIndex",
    "CommunityResolver",
    "PoiRecord",
    "community_area",
    "load_communities",
    "load_pois",
    "match_name",
    "normalize_name",
    "point_in_community",
    "point_in_ring",
    "ring_area",
]
