"""
Community score map as a GeoJSON FeatureCollection.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

from hqlens.errors import GeoError
from hqlens.model.community import Community, LatLon
from hqlens.scoring import CommunityScore


def _closed_ring(ring: Sequence[LatLon]) -> list[list[float]]:
    """
    Open (lat, lon) ring to a closed GeoJSON [lon, lat] ring.
    """
    coords = [[lon, lat] for lat, lon in ring]
    return [*coords, coords[0]]


def _geometry(community: Community) -> dict[str, Any]:
    if len(community.parts) == 1:
        return {"type": "Polygon", "coordinates": [_closed_ring(community.boundary)]}
    return {
        "type": "MultiPolygon",
        "coordinates": [[_closed_ring(part)] for part in community.parts],
    }


def export_geojson(
    communities: Sequence[Community], scores: Sequence[CommunityScore]
) -> dict[str, Any]:
    """
    Build a choropleth-ready FeatureCollection.

    Parameters
    ----------
    communities : Sequence[Community]
        All communities.
    scores : Sequence[CommunityScore]
        Scores of covered communities.

    Returns
    -------
    dict[str, Any]
        FeatureCollection ordered by community id; uncovered communities
        carry null total and zero coverage.

    Raises
    ------
    GeoError
        If a score references an unknown community.
    """
    by_id = {c.id: c for c in communities}
    scored = {s.community_id: s for s in scores}
    dangling = sorted(scored.keys() - by_id.keys())
    if dangling:
        raise GeoError(f"scores reference unknown communities {dangling}")

    features = []
    for cid in sorted(by_id):
        community = by_id[cid]
        score = scored.get(cid)
        features.append(
            {
                "type": "Feature",
                "id": cid,
                "properties": {
                    "id": cid,
                    "name": community.name,
                    "total": None if score is None else score.total,
                    "coverage": 0.0 if score is None else score.coverage,
                },
                "geometry": _geometry(community),
            }
        )
    return {"type": "FeatureCollection", "features": features}
