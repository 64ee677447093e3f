from __future__ import annotations

import json
from datetime import UTC, date, datetime, timedelta
from pathlib import Path

import pytest

from hqlens.config import CleaningConfig
from hqlens.errors import IngestError
from hqlens.ingest import (
    RawRecord,
    Rejected,
    clean_text,
    dedup,
    filter_by_date,
    normalize,
    normalize_batch,
    parse_records,
)
from hqlens.model import Entry, Platform

from .factories import SAMPLE_DIR, make_entry

_REVIEW_HEADER = "review_id,created_at,review_text,community,lat,lon\n"


def _csv(tmp_path: Path, body: str, name: str = "reviews.csv") -> Path:
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return p


def _record(text: str, created_at: str = "2023-06-01 10:00") -> RawRecord:
    return RawRecord(
        platform=Platform.REVIEW_SITE,
        source="dianping",
        fields={"review_id": "r1", "created_at": created_at, "review_text": text},
        row=2,
    )


def test_parse_three_rows(tmp_path: Path) -> None:
    p = _csv(
        tmp_path,
        _REVIEW_HEADER
        + "r1,2023-06-01 10:00,Parking is terrible,Maple Court,,\n"
        + 'r2,2023-06-02 11:00,"Quiet, green, lovely",,39.9,116.3\n'
        + "r3,2023-06-03 12:00,Lifts break weekly,,,\n",
    )
    parsed = parse_records(Platform.REVIEW_SITE, p, label="dianping")
    assert [r.fields["review_id"] for r in parsed.records] == ["r1", "r2", "r3"]
    assert parsed.rejects == []
    assert parsed.records[1].fields["review_text"] == "Quiet, green, lovely"
    assert all(r.source == "dianping" for r in parsed.records)


def test_missing_text_is_rejected_with_row_number(tmp_path: Path) -> None:
    p = _csv(
        tmp_path,
        _REVIEW_HEADER
        + "r1,2023-06-01 10:00,Fine place,,,\n"
        + "r2,2023-06-01 10:00,,,,\n"
        + "r3,2023-06-01 10:00,Another review,,,\n",
    )
    parsed = parse_records(Platform.REVIEW_SITE, p)
    assert len(parsed.records) == 2
    assert parsed.rejects == [
        Rejected(
            platform=Platform.REVIEW_SITE,
            source="review_site",
            row=3,
            reason="missing_text",
        )
    ]


def test_header_only_export(tmp_path: Path) -> None:
    parsed = parse_records(Platform.REVIEW_SITE, _csv(tmp_path, _REVIEW_HEADER))
    assert parsed.records == []
    assert parsed.rejects == []


def test_unknown_signature(tmp_path: Path) -> None:
    p = _csv(tmp_path, "foo,bar\n1,2\n")
    with pytest.raises(IngestError, match="review_text"):
        parse_records(Platform.REVIEW_SITE, p)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(IngestError):
        parse_records(Platform.GOV_BOARD, tmp_path / "nope.csv")


def test_jsonl_export(tmp_path: Path) -> None:
    lines = [
        json.dumps({"mid": "m1", "created_at": "2023-06-01 10:00", "text": "好"}),
        "{broken",
        json.dumps({"mid": 7, "created_at": "2023-06-01 10:00", "text": "地铁很近"}),
    ]
    p = tmp_path / "weibo.jsonl"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    parsed = parse_records(Platform.MICROBLOG, p)
    assert [r.fields["mid"] for r in parsed.records] == ["m1", "7"]
    assert [(r.row, r.reason) for r in parsed.rejects] == [(2, "bad_json")]


def test_clean_text_collapses_whitespace() -> None:
    assert clean_text("great park!!  \n\n", CleaningConfig()) == "great park!!"
    assert (
        clean_text("see https://example.com/x now", CleaningConfig()) == "see now"
    )


def test_clean_text_never_lengthens() -> None:
    config = CleaningConfig(strip_emoji=True)
    for raw in ("  a  b  ", "x☀y", "http://a.b", "停车 难", ""):
        assert len(clean_text(raw, config)) <= len(raw)


def test_url_only_text_is_too_short() -> None:
    result = normalize(_record("http://x.co"), CleaningConfig(min_length=2))
    assert isinstance(result, Rejected)
    assert result.reason == "too_short"


def test_too_long_text() -> None:
    result = normalize(_record("x" * 20), CleaningConfig(max_length=10))
    assert isinstance(result, Rejected)
    assert result.reason == "too_long"


def test_local_timestamp_converts_to_utc() -> None:
    entry = normalize(_record("Parking is terrible"), CleaningConfig())
    assert isinstance(entry, Entry)
    assert entry.id == "review_site:r1"
    assert entry.timestamp == datetime(2023, 6, 1, 2, 0, tzinfo=UTC)
    assert entry.to_wire()["timestamp"] == "2023-06-01T02:00:00Z"


def test_bad_timestamp() -> None:
    result = normalize(_record("Parking is terrible", "June 1st"), CleaningConfig())
    assert isinstance(result, Rejected)
    assert result.reason == "bad_timestamp"


def test_microblog_timestamp_with_offset() -> None:
    record = RawRecord(
        platform=Platform.MICROBLOG,
        source="weibo",
        fields={
            "mid": "m1",
            "created_at": "Thu Jun 01 10:00:00 +0800 2023",
            "text": "小区绿化很好",
        },
        row=1,
    )
    entry = normalize(record, CleaningConfig(min_length=1))
    assert isinstance(entry, Entry)
    assert entry.timestamp == datetime(2023, 6, 1, 2, 0, tzinfo=UTC)


def test_coordinate_hint_wins_over_name() -> None:
    record = RawRecord(
        platform=Platform.REVIEW_SITE,
        source="dianping",
        fields={
            "review_id": "r1",
            "created_at": "2023-06-01 10:00",
            "review_text": "Lovely trees everywhere",
            "community": "Maple Court",
            "lat": "39.945",
            "lon": "116.345",
        },
        row=2,
    )
    entry = normalize(record, CleaningConfig())
    assert isinstance(entry, Entry)
    assert entry.geo_hint.kind == "coordinate"


def test_batch_accounts_for_every_record() -> None:
    records = [
        _record("Parking is terrible"),
        _record("ok"),
        _record("Parking is terrible again"),
        _record("Lifts break weekly", "bad"),
    ]
    batch = normalize_batch(records, CleaningConfig())
    assert len(batch.entries) + len(batch.rejects) == len(records)
    assert [r.reason for r in batch.rejects] == [
        "too_short",
        "duplicate_id",
        "bad_timestamp",
    ]


def test_dedup_same_platform_keeps_earliest() -> None:
    early = make_entry("review_site:b", "same words")
    late = make_entry(
        "review_site:a",
        "same words",
        timestamp=early.timestamp + timedelta(hours=1),
    )
    kept, dropped = dedup([late, early])
    assert kept == [early]
    assert dropped == 1


def test_dedup_keeps_cross_platform_copies() -> None:
    a = make_entry("review_site:a", "same words")
    b = make_entry("microblog:a", "same words", platform=Platform.MICROBLOG)
    kept, dropped = dedup([a, b])
    assert [e.id for e in kept] == ["microblog:a", "review_site:a"]
    assert dropped == 0


def test_dedup_is_idempotent() -> None:
    entries = [
        make_entry(f"review_site:{i}", f"text {i % 3}") for i in range(10)
    ] + [make_entry("gov_board:1", "text 0", platform=Platform.GOV_BOARD)]
    once, _ = dedup(entries)
    twice, dropped = dedup(once)
    assert twice == once
    assert dropped == 0
    assert len({(e.platform, e.text) for e in once}) == len(once)


def test_filter_by_date_is_inclusive() -> None:
    entries = [
        make_entry(
            f"review_site:{d}", "x", timestamp=datetime(2024, 3, d, 12, tzinfo=UTC)
        )
        for d in (1, 15, 31)
    ]
    kept = filter_by_date(entries, date(2024, 3, 1), date(2024, 3, 15))
    assert [e.id for e in kept] == ["review_site:1", "review_site:15"]
    assert filter_by_date(entries, date(2024, 4, 1), date(2024, 4, 2)) == []
    with pytest.raises(ValueError):
        filter_by_date(entries, date(2024, 3, 2), date(2024, 3, 1))


def test_sample_review_export() -> None:
    parsed = parse_records(Platform.REVIEW_SITE, SAMPLE_DIR / "review_site.csv")
    batch = normalize_batch(parsed.records, CleaningConfig())
    assert len(parsed.records) == 21
    assert len(batch.entries) == 20
    assert [r.reason for r in batch.rejects] == ["too_short"]
