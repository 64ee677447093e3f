"""
Normalized resident post.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import UTC, datetime
from typing import Any

from .platform import Platform


@dataclass(frozen=True, slots=True)
class GeoHint:
    """
    Location hint attached to a post.

    Exactly one of: a WGS-84 coordinate, a community name, or nothing.
    """

    lat: float | None = None
    """
    Latitude in degrees, set together with lon.
    """

    lon: float | None = None
    """
    Longitude in degrees, set together with lat.
    """

    community_name: str | None = None
    """
    Free-text community name, when no coordinate is known.
    """

    def __post_init__(self) -> None:
        """
        Validate the hint shape and coordinate ranges.
        """
        if (self.lat is None) != (self.lon is None):
            raise ValueError("lat and lon must be given together")
        if self.lat is not None and self.community_name is not None:
            raise ValueError("a geo hint is either a coordinate or a name")
        if self.lat is not None and self.lon is not None:
            if not -90.0 <= self.lat <= 90.0:
                raise ValueError(f"latitude out of range: {self.lat}")
            if not -180.0 <= self.lon <= 180.0:
                raise ValueError(f"longitude out of range: {self.lon}")

    @classmethod
    def coordinate(cls, lat: float, lon: float) -> GeoHint:
        """
        Build a coordinate hint.

        Parameters
        ----------
        lat : float
            Latitude in degrees.
        lon : float
            Longitude in degrees.

        Returns
        -------
        GeoHint
            Coordinate hint.
        """
        return cls(lat=float(lat), lon=float(lon))

    @classmethod
    def named(cls, community_name: str) -> GeoHint:
        """
        Build a community-name hint.

        Parameters
        ----------
        community_name : str
            Name as written in the post metadata.

        Returns
        -------
        GeoHint
            Name hint.
        """
        return cls(community_name=community_name)

    @property
    def kind(self) -> str:
        """
        Hint variant: "coordinate", "community_name" or "none".
        """
        if self.lat is not None:
            return "coordinate"
        if self.community_name is not None:
            return "community_name"
        return "none"

    def to_wire(self) -> dict[str, Any] | None:
        """
        Convert to JSON-serializable form.

        Returns
        -------
        dict[str, Any] | None
            {"lat", "lon"}, {"community"} or None.
        """
        if self.lat is not None:
            return {"lat": self.lat, "lon": self.lon}
        if self.community_name is not None:
            return {"community": self.community_name}
        return None

    @classmethod
    def from_wire(cls, obj: dict[str, Any] | None) -> GeoHint:
        """
        Parse the form produced by to_wire.

        Parameters
        ----------
        obj : dict[str, Any] | None
            Serialized hint.

        Returns
        -------
        GeoHint
            Parsed hint.
        """
        if not obj:
            return cls()
        if "lat" in obj:
            return cls.coordinate(obj["lat"], obj["lon"])
        return cls.named(str(obj["community"]))


@dataclass(frozen=True, slots=True)
class Entry:
    """
    One normalized user-generated post.
    """

    id: str
    """
    Corpus-unique id, "<platform>:<native id>".
    """

    platform: Platform
    """
    Platform kind the post came from.
    """

    source: str
    """
    Free-form label of the concrete site.
    """

    timestamp: datetime
    """
    Posting instant, timezone-aware UTC.
    """

    text: str
    """
    Cleaned post text, never empty.
    """

    geo_hint: GeoHint
    """
    Location hint used for community assignment.
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert entry to JSON-serializable form.

        Returns
        -------
        dict[str, Any]
            Serialized entry.
        """
        return {
            "id": self.id,
            "platform": self.platform.value,
            "source": self.source,
            "timestamp": self.timestamp.astimezone(UTC).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": self.text,
            "geo": self.geo_hint.to_wire(),
        }

    @classmethod
    def from_wire(cls, obj: dict[str, Any]) -> Entry:
        """
        Parse the form produced by to_wire.

        Parameters
        ----------
        obj : dict[str, Any]
            Serialized entry.

        Returns
        -------
        Entry
            Parsed entry.
        """
        ts = datetime.fromisoformat(str(obj["timestamp"]).replace("Z", "+00:00"))
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=UTC)
        return cls(
            id=str(obj["id"]),
            platform=Platform(obj["platform"]),
            source=str(obj.get("source") or obj["platform"]),
            timestamp=ts.astimezone(UTC),
            text=str(obj["text"]),
            geo_hint=GeoHint.from_wire(obj.get("geo")),
        )
