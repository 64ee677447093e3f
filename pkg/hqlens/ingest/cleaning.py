"""
Text cleaning and record normalization.
"""

from __future__ import annotations

import logging
import re

from hqlens.config import CleaningConfig
from hqlens.model.entry import Entry, GeoHint

from .records import ADAPTERS, RawRecord, Rejected

logger = logging.getLogger(__name__)

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
_EMOJI_RE = re.compile(
    "["
    "\U0001f000-\U0001faff"
    "\u2600-\u27bf"
    "\u2b00-\u2bff"
    "\ufe0f"
    "\u200d"
    "]+"
)


def clean_text(text: str, config: CleaningConfig) -> str:
    """
    Apply the configured cleaning rules.

    Cleaning only removes or merges characters, so it never lengthens text.

    Parameters
    ----------
    text : str
        Raw post text.
    config : CleaningConfig
        Cleaning rules.

    Returns
    -------
    str
        Cleaned text, stripped at both ends.
    """
    out = text
    if config.strip_urls:
        out = _URL_RE.sub(" ", out)
    if config.strip_emoji:
        out = _EMOJI_RE.sub("", out)
    if config.collapse_whitespace:
        out = _WS_RE.sub(" ", out)
    return out.strip()


def _geo_hint(record: RawRecord) -> GeoHint:
    """
    Build the location hint of a record.

    Parameters
    ----------
    record : RawRecord
        Source row.

    Returns
    -------
    GeoHint
        Coordinate when both values parse and are in range, else community
        name when present, else none.
    """
    adapter = ADAPTERS[record.platform]
    if adapter.lat_field and adapter.lon_field:
        lat = (record.fields.get(adapter.lat_field) or "").strip()
        lon = (record.fields.get(adapter.lon_field) or "").strip()
        if lat and lon:
            try:
                return GeoHint.coordinate(float(lat), float(lon))
            except ValueError:
                logger.debug(
                    "Ignoring bad coordinate on %s row %d", record.platform, record.row
                )
    if adapter.community_field:
        name = (record.fields.get(adapter.community_field) or "").strip()
        if name:
            return GeoHint.named(name)
    return GeoHint()


def normalize(record: RawRecord, config: CleaningConfig) -> Entry | Rejected:
    """
    Turn a raw record into an entry, or reject it.

    Parameters
    ----------
    record : RawRecord
        Source row.
    config : CleaningConfig
        Cleaning rules.

    Returns
    -------
    Entry | Rejected
        Entry with cleaned text and UTC timestamp, or a rejection with
        reason "bad_timestamp", "too_short" or "too_long".
    """
    adapter = ADAPTERS[record.platform]

    def _reject(reason: str) -> Rejected:
        return Rejected(
            platform=record.platform,
            source=record.source,
            row=record.row,
            reason=reason,
        )

    try:
        ts = adapter.parse_time(record.fields.get(adapter.time_field, ""))
    except ValueError:
        return _reject("bad_timestamp")

    text = clean_text(record.fields.get(adapter.text_field, ""), config)
    if len(text) < config.min_length:
        return _reject("too_short")
    if len(text) > config.max_length:
        return _reject("too_long")

    native_id = record.fields[adapter.id_field].strip()
    return Entry(
        id=f"{record.platform.value}:{native_id}",
        platform=record.platform,
        source=record.source,
        timestamp=ts,
        text=text,
        geo_hint=_geo_hint(record),
    )
