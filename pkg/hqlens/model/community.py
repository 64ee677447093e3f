"""
Residential community with its area-of-interest boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

LatLon = tuple[float, float]


def _normalize_ring(ring: tuple[LatLon, ...] | list[LatLon]) -> tuple[LatLon, ...]:
    """
    Drop a repeated closing vertex and validate the vertex count.

    Parameters
    ----------
    ring : tuple[LatLon, ...] | list[LatLon]
        Ordered (lat, lon) vertices.

    Returns
    -------
    tuple[LatLon, ...]
        Open ring with at least three vertices.
    """
    pts = tuple((float(lat), float(lon)) for lat, lon in ring)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) < 3:
        raise ValueError("a community boundary needs at least 3 distinct vertices")
    return pts


@dataclass(frozen=True, slots=True)
class Community:
    """
    Named residential community.

    A boundary may consist of several parts (multipolygon features); every
    part is an open ring of (lat, lon) vertices.
    """

    id: str
    """
    Stable community id.
    """

    name: str
    """
    Display name.
    """

    parts: tuple[tuple[LatLon, ...], ...]
    """
    Boundary parts, each an open ring with >= 3 vertices.
    """

    centroid: LatLon | None = None
    """
    Optional representative point.
    """

    @classmethod
    def new(
        cls,
        *,
        id: str,
        name: str,
        parts: list[list[LatLon]] | tuple[tuple[LatLon, ...], ...],
        centroid: LatLon | None = None,
    ) -> Community:
        """
        Construct a community, normalizing its rings.

        Parameters
        ----------
        id : str
            Community id.
        name : str
            Display name.
        parts : list[list[LatLon]] | tuple[tuple[LatLon, ...], ...]
            Boundary parts; closing vertices may or may not repeat.
        centroid : LatLon | None
            Optional representative point.

        Returns
        -------
        Community
            Normalized community.
        """
        if not parts:
            raise ValueError(f"community {id!r} has no boundary")
        return cls(
            id=id,
            name=name,
            parts=tuple(_normalize_ring(p) for p in parts),
            centroid=centroid,
        )

    @property
    def boundary(self) -> tuple[LatLon, ...]:
        """
        First (outer) boundary part.
        """
        return self.parts[0]
