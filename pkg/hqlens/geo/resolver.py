"""
Entry-to-community resolution cascade.

Order: coordinate inside a polygon; else the hinted name against community
names; else the hinted name against POI names, the POI's community coming
from its reference or its location; else unassigned.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any

from hqlens.config import MatchPolicy
from hqlens.errors import GeoError
from hqlens.model.community import Community, LatLon
from hqlens.model.entry import Entry

from .communities import CommunityIndex, point_in_community
from .matching import best_match, match_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PoiRecord:
    """
    Named point of interest.
    """

    name: str
    """
    POI name.
    """

    location: LatLon
    """
    (lat, lon) in degrees.
    """

    community_id: str | None = None
    """
    Community the POI belongs to, when known.
    """

    def __post_init__(self) -> None:
        """
        Validate coordinates.
        """
        lat, lon = self.location
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise ValueError(f"POI {self.name!r} has invalid location {self.location}")


_POI_COLUMNS = ("name", "lat", "lon", "community_id")


def load_pois(path: str | Path) -> list[PoiRecord]:
    """
    Load POIs from CSV (name, lat, lon, community_id?).

    Parameters
    ----------
    path : str | Path
        CSV file with a header row.

    Returns
    -------
    list[PoiRecord]
        POIs in file order.

    Raises
    ------
    GeoError
        If the file is unreadable, lacks columns, or a row is invalid.
    """
    p = Path(path)
    pois: list[PoiRecord] = []
    try:
        with p.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            missing = {"name", "lat", "lon"} - set(reader.fieldnames or ())
            if missing:
                raise GeoError(f"{p}: missing POI columns {sorted(missing)}")
            for row in reader:
                # Short rows fill missing trailing fields with None.
                cell = {k: (row.get(k) or "").strip() for k in _POI_COLUMNS}
                try:
                    if not cell["name"]:
                        raise ValueError("empty POI name")
                    pois.append(
                        PoiRecord(
                            name=cell["name"],
                            location=(float(cell["lat"]), float(cell["lon"])),
                            community_id=cell["community_id"] or None,
                        )
                    )
                except (TypeError, ValueError) as exc:
                    raise GeoError(f"{p}:{reader.line_num}: {exc}") from exc
    except OSError as exc:
        raise GeoError(f"cannot read POIs {p}: {exc}") from exc
    logger.debug("Loaded %d POIs from %s", len(pois), p)
    return pois


class AssignmentMethod(StrEnum):
    """
    Cascade step that produced an assignment.
    """

    COORDINATE = "coordinate"
    NAME = "name"
    POI = "poi"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True, slots=True)
class Assignment:
    """
    Community resolution of one entry.
    """

    entry_id: str
    community_id: str | None
    method: AssignmentMethod
    reason: str | None = None
    """
    Why the entry stayed unassigned.
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to the JSON-lines artifact form.

        Returns
        -------
        dict[str, Any]
            Assignment record.
        """
        obj: dict[str, Any] = {
            "entry_id": self.entry_id,
            "community_id": self.community_id,
            "method": self.method.value,
        }
        if self.reason is not None:
            obj["reason"] = self.reason
        return obj

    @classmethod
    def from_wire(cls, obj: dict[str, Any]) -> Assignment:
        """
        Parse the form produced by to_wire.

        Parameters
        ----------
        obj : dict[str, Any]
            Serialized assignment.

        Returns
        -------
        Assignment
            Parsed assignment.
        """
        return cls(
            entry_id=str(obj["entry_id"]),
            community_id=obj.get("community_id"),
            method=AssignmentMethod(obj["method"]),
            reason=obj.get("reason"),
        )


@dataclass(slots=True)
class CommunityResolver:
    """
    Resolves entries to communities.
    """

    index: CommunityIndex
    """
    Community lookup.
    """

    pois: tuple[PoiRecord, ...]
    """
    POIs backing name resolution.
    """

    policy: MatchPolicy
    """
    Name matching policy.
    """

    @classmethod
    def new(
        cls,
        communities: Iterable[Community],
        pois: Sequence[PoiRecord] = (),
        policy: MatchPolicy | None = None,
    ) -> CommunityResolver:
        """
        Construct a resolver.

        Parameters
        ----------
        communities : Iterable[Community]
            Known communities.
        pois : Sequence[PoiRecord]
            POIs; dangling community references are rejected.
        policy : MatchPolicy | None
            Matching policy.

        Returns
        -------
        CommunityResolver
            Resolver.

        Raises
        ------
        GeoError
            If a POI references an unknown community.
        """
        index = CommunityIndex.new(communities)
        for poi in pois:
            if poi.community_id is not None and poi.community_id not in index.by_id:
                raise GeoError(
                    f"POI {poi.name!r} references unknown community "
                    f"{poi.community_id!r}"
                )
        return cls(index=index, pois=tuple(pois), policy=policy or MatchPolicy())

    def _via_poi(self, name: str) -> str | None:
        """
        Resolve a name through the POI list.
        """
        key = best_match(
            name, ((f"{k:09d}", p.name) for k, p in enumerate(self.pois)), self.policy
        )
        if key is None:
            return None
        poi = self.pois[int(key)]
        if poi.community_id is not None:
            return poi.community_id
        return point_in_community(poi.location, self.index.communities)

    def resolve(self, entry: Entry) -> Assignment:
        """
        Run the resolution cascade for one entry.

        Parameters
        ----------
        entry : Entry
            Entry with a geo hint.

        Returns
        -------
        Assignment
            Community assignment, or an unassigned record with a reason.
        """
        hint = entry.geo_hint
        if hint.lat is not None and hint.lon is not None:
            cid = self.index.locate((hint.lat, hint.lon))
            if cid is not None:
                return Assignment(entry.id, cid, AssignmentMethod.COORDINATE)
            reason = "coordinate outside every community"
        elif hint.community_name is not None:
            cid = match_name(hint.community_name, self.index.communities, self.policy)
            if cid is not None:
                return Assignment(entry.id, cid, AssignmentMethod.NAME)
            cid = self._via_poi(hint.community_name)
            if cid is not None:
                return Assignment(entry.id, cid, AssignmentMethod.POI)
            reason = f"no community or POI matches {hint.community_name!r}"
        else:
            reason = "no location hint"
        logger.debug("Entry %s unassigned: %s", entry.id, reason)
        return Assignment(entry.id, None, AssignmentMethod.UNASSIGNED, reason)
