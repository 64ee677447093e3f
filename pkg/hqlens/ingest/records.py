"""
Per-platform export adapters.

Every platform export is a UTF-8 CSV file with a header row, or a JSON-lines
file whose objects use the same field names. Documented column sets:

review_site
    review_id, created_at ("YYYY-MM-DD HH:MM", UTC+8), review_text,
    optional community, lat, lon.
microblog
    mid, created_at ("Thu Jun 01 10:00:00 +0800 2023" or
    "YYYY-MM-DD HH:MM", UTC+8), text, optional location, lat, lon.
gov_board
    message_id, posted_at ("YYYY-MM-DD HH:MM:SS", UTC+8), content,
    optional community.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from datetime import UTC, datetime, timedelta, timezone
from pathlib import Path
from typing import Any

from hqlens.errors import IngestError
from hqlens.model.platform import Platform

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PlatformAdapter:
    """
    Column layout and timestamp format of one platform export.
    """

    id_field: str
    """
    Column holding the native post id.
    """

    time_field: str
    """
    Column holding the posting time.
    """

    text_field: str
    """
    Column holding the post text.
    """

    time_formats: tuple[str, ...]
    """
    strptime formats tried in order.
    """

    utc_offset_hours: float = 8.0
    """
    Offset applied to timestamps without an explicit zone.
    """

    community_field: str | None = None
    """
    Optional column with a community name.
    """

    lat_field: str | None = None
    """
    Optional latitude column.
    """

    lon_field: str | None = None
    """
    Optional longitude column.
    """

    @property
    def required(self) -> tuple[str, str, str]:
        """
        Columns every export of this platform must declare.
        """
        return (self.id_field, self.time_field, self.text_field)

    def parse_time(self, value: str) -> datetime:
        """
        Parse a platform-local timestamp into UTC.

        Parameters
        ----------
        value : str
            Timestamp as exported.

        Returns
        -------
        datetime
            Timezone-aware UTC instant.

        Raises
        ------
        ValueError
            If no documented format matches.
        """
        local = timezone(timedelta(hours=self.utc_offset_hours))
        text = value.strip()
        for fmt in self.time_formats:
            try:
                ts = datetime.strptime(text, fmt)
            except ValueError:
                continue
            if ts.tzinfo is None:
                ts = ts.replace(tzinfo=local)
            return ts.astimezone(UTC)
        raise ValueError(f"unrecognized timestamp {value!r}")


ADAPTERS: dict[Platform, PlatformAdapter] = {
    Platform.REVIEW_SITE: PlatformAdapter(
        id_field="review_id",
        time_field="created_at",
        text_field="review_text",
        time_formats=("%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S"),
        community_field="community",
        lat_field="lat",
        lon_field="lon",
    ),
    Platform.MICROBLOG: PlatformAdapter(
        id_field="mid",
        time_field="created_at",
        text_field="text",
        time_formats=("%a %b %d %H:%M:%S %z %Y", "%Y-%m-%d %H:%M"),
        community_field="location",
        lat_field="lat",
        lon_field="lon",
    ),
    Platform.GOV_BOARD: PlatformAdapter(
        id_field="message_id",
        time_field="posted_at",
        text_field="content",
        time_formats=("%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"),
        community_field="community",
    ),
}


@dataclass(frozen=True, slots=True)
class Rejected:
    """
    Record that did not become an entry.
    """

    platform: Platform
    """
    Platform kind of the export.
    """

    source: str
    """
    Site label of the export.
    """

    row: int
    """
    1-based line number in the source file.
    """

    reason: str
    """
    Machine-readable reason, e.g. "too_short".
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to the rejects sidecar form.

        Returns
        -------
        dict[str, Any]
            {"platform", "source", "row", "reason"}.
        """
        return {
            "platform": self.platform.value,
            "source": self.source,
            "row": self.row,
            "reason": self.reason,
        }


@dataclass(frozen=True, slots=True)
class RawRecord:
    """
    One logical row of a platform export, kept verbatim.
    """

    platform: Platform
    """
    Platform kind of the export.
    """

    source: str
    """
    Site label of the export.
    """

    fields: dict[str, str]
    """
    Field values in source column order, unmodified.
    """

    row: int
    """
    1-based line number in the source file.
    """


@dataclass(frozen=True, slots=True)
class ParsedSource:
    """
    Result of parsing one export.
    """

    records: list[RawRecord]
    """
    Well-formed rows.
    """

    rejects: list[Rejected]
    """
    Malformed rows with reasons.
    """


def _stringify(value: Any) -> str:
    """
    Render a JSON scalar as the string a CSV cell would hold.

    Parameters
    ----------
    value : Any
        Decoded JSON value.

    Returns
    -------
    str
        String form; None becomes "".
    """
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False)


def _check_signature(
    columns: list[str], adapter: PlatformAdapter, platform: Platform, path: Path
) -> None:
    """
    Verify that an export declares the platform's required columns.

    Parameters
    ----------
    columns : list[str]
        Declared columns.
    adapter : PlatformAdapter
        Expected layout.
    platform : Platform
        Platform kind.
    path : Path
        Export file, for the error message.
    """
    missing = [c for c in adapter.required if c not in columns]
    if missing:
        raise IngestError(
            f"{path}: unknown {platform.value} format signature, "
            f"missing columns {', '.join(missing)}"
        )


def _row_reject(
    fields: dict[str, str], adapter: PlatformAdapter
) -> str | None:
    """
    Check a row for missing required values.

    Parameters
    ----------
    fields : dict[str, str]
        Row fields.
    adapter : PlatformAdapter
        Expected layout.

    Returns
    -------
    str | None
        Reject reason, or None when the row is complete.
    """
    if not (fields.get(adapter.text_field) or "").strip():
        return "missing_text"
    if not (fields.get(adapter.id_field) or "").strip():
        return "missing_id"
    if not (fields.get(adapter.time_field) or "").strip():
        return "missing_timestamp"
    return None


def parse_records(
    platform: Platform,
    source: str | Path,
    *,
    label: str | None = None,
) -> ParsedSource:
    """
    Parse a platform export into raw records.

    Parameters
    ----------
    platform : Platform
        Platform kind, selects the adapter.
    source : str | Path
        CSV or JSON-lines (.jsonl / .json) export.
    label : str | None
        Site label; defaults to the platform kind.

    Returns
    -------
    ParsedSource
        One record per well-formed row and one reject per malformed row.

    Raises
    ------
    IngestError
        If the file is unreadable or lacks the platform's required columns.
    """
    path = Path(source)
    adapter = ADAPTERS[platform]
    site = label or platform.value
    records: list[RawRecord] = []
    rejects: list[Rejected] = []

    def _reject(row: int, reason: str) -> None:
        logger.debug("Rejected %s row %d: %s", path, row, reason)
        rejects.append(Rejected(platform=platform, source=site, row=row, reason=reason))

    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            if path.suffix.lower() in (".jsonl", ".json"):
                checked = False
                for line_no, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError:
                        _reject(line_no, "bad_json")
                        continue
                    if not isinstance(obj, dict):
                        _reject(line_no, "bad_json")
                        continue
                    if not checked:
                        known = {adapter.id_field, adapter.text_field}
                        if not known & set(obj):
                            _check_signature(list(obj), adapter, platform, path)
                        checked = True
                    fields = {str(k): _stringify(v) for k, v in obj.items()}
                    reason = _row_reject(fields, adapter)
                    if reason is not None:
                        _reject(line_no, reason)
                        continue
                    records.append(
                        RawRecord(
                            platform=platform, source=site, fields=fields, row=line_no
                        )
                    )
            else:
                reader = csv.DictReader(fh)
                if reader.fieldnames is None:
                    return ParsedSource(records=[], rejects=[])
                _check_signature(list(reader.fieldnames), adapter, platform, path)
                for row in reader:
                    fields = {
                        k: (v if isinstance(v, str) else "")
                        for k, v in row.items()
                        if isinstance(k, str)
                    }
                    reason = _row_reject(fields, adapter)
                    if reason is not None:
                        _reject(reader.line_num, reason)
                        continue
                    records.append(
                        RawRecord(
                            platform=platform,
                            source=site,
                            fields=fields,
                            row=reader.line_num,
                        )
                    )
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise IngestError(f"unreadable export {path}: {exc}") from exc

    logger.info(
        "Parsed %s (%s): %d records, %d rejects",
        path.name,
        platform.value,
        len(records),
        len(rejects),
    )
    return ParsedSource(records=records, rejects=rejects)
