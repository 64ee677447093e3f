from __future__ import annotations

import asyncio
import json
from pathlib import Path

import pytest

from hqlens.errors import MalformedResponseError, MissingPredictionError
from hqlens.extract.backend import (
    BackendInfo,
    BackendMode,
    ExtractionResult,
    extract_many,
)
from hqlens.extract.predictions import PredictionFileBackend
from hqlens.model import Entry, Taxonomy

from .factories import SAMPLE_DIR, make_entry, make_result


def _write(tmp_path: Path, results: list[ExtractionResult]) -> Path:
    p = tmp_path / "preds.jsonl"
    p.write_text(
        "".join(json.dumps(r.to_wire()) + "\n" for r in results), encoding="utf-8"
    )
    return p


def test_passthrough(tmp_path: Path, taxonomy: Taxonomy) -> None:
    stored = make_result("review_site:e1", ("4.1", -2), ("8.1", 1))
    backend = PredictionFileBackend.load(_write(tmp_path, [stored]))
    result = asyncio.run(backend.extract(make_entry("review_site:e1"), taxonomy))
    assert result == stored
    assert len(result.units) == 2
    assert backend.info == BackendInfo(
        name="preds", mode=BackendMode.PREDICTION_FILE
    )


def test_missing_entry(tmp_path: Path, taxonomy: Taxonomy) -> None:
    backend = PredictionFileBackend.load(_write(tmp_path, []), name="svm")
    with pytest.raises(MissingPredictionError) as err:
        asyncio.run(backend.extract(make_entry("review_site:zz"), taxonomy))
    assert err.value.entry_id == "review_site:zz"


def test_extract_many_collects_missing(tmp_path: Path, taxonomy: Taxonomy) -> None:
    backend = PredictionFileBackend.load(
        _write(tmp_path, [make_result("review_site:b", ("4.1", -1))])
    )
    entries = [make_entry(f"review_site:{k}") for k in "cba"]
    missing: list[str] = []
    results = asyncio.run(
        extract_many(backend, entries, taxonomy, workers=2, missing=missing)
    )
    assert [r.entry_id for r in results] == ["review_site:b"]
    assert missing == ["review_site:a", "review_site:c"]
    with pytest.raises(MissingPredictionError):
        asyncio.run(extract_many(backend, entries, taxonomy))


def test_invalid_units_are_dropped(tmp_path: Path, taxonomy: Taxonomy) -> None:
    backend = PredictionFileBackend.load(
        _write(tmp_path, [make_result("review_site:e1", ("4.1", 3), ("8.1", 1))])
    )
    (result,) = asyncio.run(extract_many(backend, [make_entry()], taxonomy))
    assert [str(u.indicator_id) for u in result.units] == ["8.1"]
    assert any("sentiment out of range" in d for d in result.diagnostics)


class _Garbled:
    @property
    def info(self) -> BackendInfo:
        return BackendInfo(name="garbled", mode=BackendMode.ZERO_SHOT)

    async def extract(self, entry: Entry, taxonomy: Taxonomy) -> ExtractionResult:
        raise MalformedResponseError("reply contains no JSON object", ["reply: ?"])


def test_malformed_reply_becomes_irrelevant(taxonomy: Taxonomy) -> None:
    (result,) = asyncio.run(extract_many(_Garbled(), [make_entry()], taxonomy))
    assert not result.relevant
    assert result.diagnostics[0].startswith("malformed_response:")
    assert "reply: ?" in result.diagnostics


def test_gold_file_as_predictions(taxonomy: Taxonomy) -> None:
    backend = PredictionFileBackend.load(SAMPLE_DIR / "gold.jsonl", name="oracle")
    assert len(backend.predictions) == 12
    assert not backend.predictions["microblog:m008"].relevant
    first = backend.predictions["review_site:r001"]
    assert [(str(u.indicator_id), u.sentiment) for u in first.units] == [("4.1", -2)]
