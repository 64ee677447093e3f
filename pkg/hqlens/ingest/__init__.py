"""
Platform export parsing, text cleaning, deduplication and date filtering.
"""

from .cleaning import clean_text, normalize
from .corpus import NormalizedBatch, dedup, filter_by_date, normalize_batch
from .records import (
    ADAPTERS,
    ParsedSource,
    PlatformAdapter,
    RawRecord,
    Rejected,
    parse_records,
)

__all__ = [
    "ADAPTERS",
    "NormalizedBatch",
    "ParsedSource",
    "PlatformAdapter",
    "RawRecord",
    "Rejected",
    "clean_text",
    "dedup",
    "filter_by_date",
    "normalize",
    "normalize_batch",
    "parse_records",
]
