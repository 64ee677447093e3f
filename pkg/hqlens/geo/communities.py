"""
Community boundaries: GeoJSON loading and point-in-polygon lookup.

Geometry is planar on raw (lat, lon) degrees.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from hqlens.errors import GeoError
from hqlens.model.community import Community, LatLon

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12


def ring_area(ring: Sequence[LatLon]) -> float:
    """
    Planar area of an open ring (shoelace formula).

    Parameters
    ----------
    ring : Sequence[LatLon]
        Vertices.

    Returns
    -------
    float
        Unsigned area in squared degrees.
    """
    n = len(ring)
    twice = 0.0
    for k in range(n):
        y1, x1 = ring[k]
        y2, x2 = ring[(k + 1) % n]
        twice += x1 * y2 - x2 * y1
    return abs(twice) / 2.0


def community_area(community: Community) -> float:
    """
    Total area of a community's parts.

    Parameters
    ----------
    community : Community
        Community.

    Returns
    -------
    float
        Sum of part areas.
    """
    return sum(ring_area(part) for part in community.parts)


def _on_segment(lat: float, lon: float, a: LatLon, b: LatLon) -> bool:
    """
    Whether a point lies on the segment a-b.
    """
    (ay, ax), (by, bx) = a, b
    cross = (bx - ax) * (lat - ay) - (by - ay) * (lon - ax)
    scale = max(abs(bx - ax), abs(by - ay), 1.0)
    if abs(cross) > BOUNDARY_TOLERANCE * scale:
        return False
    return (
        min(ax, bx) - BOUNDARY_TOLERANCE <= lon <= max(ax, bx) + BOUNDARY_TOLERANCE
        and min(ay, by) - BOUNDARY_TOLERANCE <= lat <= max(ay, by) + BOUNDARY_TOLERANCE
    )


def point_in_ring(point: LatLon, ring: Sequence[LatLon]) -> bool:
    """
    Ray-casting test; points on an edge count as inside.

    Parameters
    ----------
    point : LatLon
        Query point.
    ring : Sequence[LatLon]
        Open ring.

    Returns
    -------
    bool
        True if the point is inside or on the boundary.
    """
    lat, lon = point
    inside = False
    n = len(ring)
    j = n - 1
    for i in range(n):
        yi, xi = ring[i]
        yj, xj = ring[j]
        if _on_segment(lat, lon, ring[j], ring[i]):
            return True
        if (yi > lat) != (yj > lat) and lon < (xj - xi) * (lat - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def contains(community: Community, point: LatLon) -> bool:
    """
    Whether any part of a community contains a point.

    Parameters
    ----------
    community : Community
        Community to test.
    point : LatLon
        Query point.

    Returns
    -------
    bool
        True if inside or on the boundary of some part.
    """
    return any(point_in_ring(point, part) for part in community.parts)


def _smallest(candidates: Iterable[Community]) -> str | None:
    """
    Id of the smallest-area candidate, ties by id.
    """
    best: tuple[float, str] | None = None
    for c in candidates:
        key = (community_area(c), c.id)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]


def point_in_community(point: LatLon, communities: Iterable[Community]) -> str | None:
    """
    Find the community containing a point.

    Parameters
    ----------
    point : LatLon
        Query point (lat, lon).
    communities : Iterable[Community]
        Candidate communities.

    Returns
    -------
    str | None
        Id of the smallest containing community, or None.
    """
    return _smallest(c for c in communities if contains(c, point))


@dataclass(frozen=True, slots=True)
class _Bounds:
    """
    Axis-aligned bounding box of a community.
    """

    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    @classmethod
    def of(cls, community: Community) -> _Bounds:
        """
        Bounding box of all parts.
        """
        pts = [p for part in community.parts for p in part]
        return cls(
            min(p[0] for p in pts),
            min(p[1] for p in pts),
            max(p[0] for p in pts),
            max(p[1] for p in pts),
        )

    def covers(self, point: LatLon) -> bool:
        """
        Whether the box contains the point.
        """
        lat, lon = point
        return (
            self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon
        )


@dataclass(slots=True)
class CommunityIndex:
    """
    Read-only lookup over loaded communities.
    """

    by_id: dict[str, Community]
    """
    Communities keyed by id.
    """

    _bounds: dict[str, _Bounds]
    """
    Bounding boxes for candidate filtering.
    """

    @classmethod
    def new(cls, communities: Iterable[Community]) -> CommunityIndex:
        """
        Build an index.

        Parameters
        ----------
        communities : Iterable[Community]
            Communities with unique ids.

        Returns
        -------
        CommunityIndex
            Index.

        Raises
        ------
        GeoError
            On duplicate ids.
        """
        by_id: dict[str, Community] = {}
        for c in communities:
            if c.id in by_id:
                raise GeoError(f"duplicate community id {c.id!r}")
            by_id[c.id] = c
        return cls(
            by_id=dict(sorted(by_id.items())),
            _bounds={cid: _Bounds.of(c) for cid, c in by_id.items()},
        )

    def __len__(self) -> int:
        """
        Number of communities.
        """
        return len(self.by_id)

    @property
    def communities(self) -> list[Community]:
        """
        Communities in id order.
        """
        return list(self.by_id.values())

    def locate(self, point: LatLon) -> str | None:
        """
        Find the community containing a point.

        Parameters
        ----------
        point : LatLon
            Query point.

        Returns
        -------
        str | None
            Smallest containing community id, or None.
        """
        return point_in_community(
            point,
            (c for cid, c in self.by_id.items() if self._bounds[cid].covers(point)),
        )


def _ring(raw: Any, feature: str) -> list[LatLon]:
    """
    Convert a GeoJSON [lon, lat] ring to (lat, lon) vertices.
    """
    try:
        return [(float(p[1]), float(p[0])) for p in raw]
    except (TypeError, ValueError, IndexError) as exc:
        raise GeoError(f"feature {feature}: malformed ring") from exc


def community_from_feature(feature: dict[str, Any], position: int) -> Community:
    """
    Build a community from one GeoJSON feature.

    Interior rings (holes) are ignored.

    Parameters
    ----------
    feature : dict[str, Any]
        Polygon or MultiPolygon feature with a "name" property.
    position : int
        Index of the feature, used when it has no id.

    Returns
    -------
    Community
        Community with one part per polygon.

    Raises
    ------
    GeoError
        If the geometry is not polygonal or the feature lacks a name.
    """
    props = feature.get("properties") or {}
    fid = props.get("id", feature.get("id"))
    label = repr(fid) if fid is not None else f"#{position}"
    name = props.get("name")
    if not isinstance(name, str) or not name.strip():
        raise GeoError(f"feature {label} has no name property")

    geometry = feature.get("geometry") or {}
    kind = geometry.get("type")
    coords = geometry.get("coordinates")
    if kind == "Polygon":
        polygons = [coords]
    elif kind == "MultiPolygon":
        polygons = list(coords or [])
    else:
        raise GeoError(f"feature {label} ({name}) has non-polygon geometry {kind}")
    if not polygons or any(not p for p in polygons):
        raise GeoError(f"feature {label} ({name}) has an empty polygon")

    try:
        return Community.new(
            id=str(fid) if fid is not None else f"community-{position}",
            name=name.strip(),
            parts=[_ring(poly[0], label) for poly in polygons],
        )
    except ValueError as exc:
        raise GeoError(f"feature {label} ({name}): {exc}") from exc


def load_communities(path: str | Path) -> list[Community]:
    """
    Load community boundaries from a GeoJSON FeatureCollection.

    Parameters
    ----------
    path : str | Path
        GeoJSON file.

    Returns
    -------
    list[Community]
        One community per feature, in file order.

    Raises
    ------
    GeoError
        If the file cannot be parsed or a feature is not a named polygon.
    """
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeoError(f"cannot read communities {p}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoError(f"{p} is not a GeoJSON FeatureCollection")

    communities = [
        community_from_feature(f, k) for k, f in enumerate(doc.get("features") or [])
    ]
    logger.debug("Loaded %d communities from %s", len(communities), p)
    return communities
