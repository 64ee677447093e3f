"""
Batch normalization, deduplication and date filtering.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from datetime import date

from hqlens.config import CleaningConfig
from hqlens.model.entry import Entry

from .cleaning import normalize
from .records import RawRecord, Rejected

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class NormalizedBatch:
    """
    Outcome of normalizing a batch of raw records.

    Every input record ends up in exactly one of the two lists.
    """

    entries: list[Entry]
    """
    Entries ordered by id.
    """

    rejects: list[Rejected]
    """
    Rejections in input order.
    """


def normalize_batch(
    records: Iterable[RawRecord], config: CleaningConfig
) -> NormalizedBatch:
    """
    Normalize records, rejecting repeated native ids.

    Parameters
    ----------
    records : Iterable[RawRecord]
        Raw rows of one or more exports.
    config : CleaningConfig
        Cleaning rules.

    Returns
    -------
    NormalizedBatch
        Entries sorted by id plus rejects.
    """
    entries: dict[str, Entry] = {}
    rejects: list[Rejected] = []
    for record in records:
        result = normalize(record, config)
        if isinstance(result, Rejected):
            rejects.append(result)
            continue
        if result.id in entries:
            rejects.append(
                Rejected(
                    platform=record.platform,
                    source=record.source,
                    row=record.row,
                    reason="duplicate_id",
                )
            )
            continue
        entries[result.id] = result

    return NormalizedBatch(
        entries=[entries[k] for k in sorted(entries)],
        rejects=rejects,
    )


def dedup(entries: list[Entry]) -> tuple[list[Entry], int]:
    """
    Drop repeated posts.

    Two entries are duplicates when they share platform and cleaned text;
    the earliest by (timestamp, id) survives.

    Parameters
    ----------
    entries : list[Entry]
        Entries to deduplicate.

    Returns
    -------
    tuple[list[Entry], int]
        Kept entries ordered by id, and the number dropped.
    """
    seen: set[tuple[str, str]] = set()
    kept: list[Entry] = []
    for entry in sorted(entries, key=lambda e: (e.timestamp, e.id)):
        key = (entry.platform.value, entry.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(entry)

    kept.sort(key=lambda e: e.id)
    dropped = len(entries) - len(kept)
    if dropped:
        logger.debug("Dropped %d duplicate entries", dropped)
    return kept, dropped


def filter_by_date(entries: list[Entry], start: date, end: date) -> list[Entry]:
    """
    Keep entries posted within an inclusive date window.

    Parameters
    ----------
    entries : list[Entry]
        Entries to filter.
    start : date
        First kept UTC date.
    end : date
        Last kept UTC date.

    Returns
    -------
    list[Entry]
        Entries with start <= timestamp.date() <= end, input order kept.

    Raises
    ------
    ValueError
        If start is after end.
    """
    if start > end:
        raise ValueError(f"invalid date range {start} .. {end}")
    return [e for e in entries if start <= e.timestamp.date() <= end]
