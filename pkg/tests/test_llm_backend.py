from __future__ import annotations

import asyncio
import json
from pathlib import Path

import httpx
import pytest

from hqlens.config import LlmClientConfig
from hqlens.extract.backend import BackendMode, ExtractionResult
from hqlens.extract.llm_backend import LlmBackend, load_exemplars, sample_exemplars
from hqlens.extract.prompts import Exemplar
from hqlens.model import Taxonomy

from .factories import make_entry, make_result


def _config(api_key: str, **overrides: object) -> LlmClientConfig:
    params: dict[str, object] = {
        "base_url": "https://llm.test/v1",
        "api_key_env": api_key,
        "backoff_base_s": 0.0,
    }
    params.update(overrides)
    return LlmClientConfig(**params)  # type: ignore[arg-type]


def _chat(obj: object) -> httpx.Response:
    content = json.dumps(obj)
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def _prompt(request: httpx.Request) -> str:
    return str(json.loads(request.content)["messages"][-1]["content"])


def _run(
    backend_config: LlmClientConfig,
    transport: httpx.MockTransport,
    taxonomy: Taxonomy,
    text: str = "The parking spaces are impossible to find, always full.",
) -> ExtractionResult:
    async def go() -> ExtractionResult:
        backend = LlmBackend.new(backend_config, transport=transport)
        try:
            return await backend.extract(make_entry(text=text), taxonomy)
        finally:
            await backend.aclose()

    return asyncio.run(go())


def _write_gold(tmp_path: Path, n: int) -> Path:
    lines = []
    for k in range(n):
        entry = make_entry(f"review_site:g{k}", f"Parking story number {k}")
        result = make_result(entry.id, ("4.1", -1))
        lines.append(
            json.dumps(
                {
                    "entry": entry.to_wire(),
                    "relevant": True,
                    "units": [u.to_wire() for u in result.units],
                }
            )
        )
    p = tmp_path / "gold.jsonl"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def test_combined_mode(api_key: str, taxonomy: Taxonomy) -> None:
    calls: list[str] = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(_prompt(request))
        return _chat(
            {
                "relevant": True,
                "units": [
                    {
                        "object": "parking spaces",
                        "content": "always full",
                        "indicator": "4.1",
                        "sentiment": -2,
                    }
                ],
            }
        )

    result = _run(_config(api_key), httpx.MockTransport(handler), taxonomy)
    assert len(calls) == 1
    assert [(str(u.indicator_id), u.sentiment) for u in result.units] == [("4.1", -2)]


def test_per_task_mode(api_key: str, taxonomy: Taxonomy) -> None:
    calls: list[str] = []

    def handler(request: httpx.Request) -> httpx.Response:
        prompt = _prompt(request)
        calls.append(prompt)
        if prompt.startswith("Decide whether"):
            return _chat({"relevant": True})
        if prompt.startswith("Extract every"):
            return _chat(
                {
                    "units": [
                        {"object": "parking", "content": "full", "indicator": "4.1"},
                        {"object": "lift", "content": "ok", "indicator": "8.1"},
                    ]
                }
            )
        return _chat({"sentiments": [-2, 1]})

    result = _run(
        _config(api_key, task_mode="per_task"), httpx.MockTransport(handler), taxonomy
    )
    assert len(calls) == 3
    assert [(str(u.indicator_id), u.sentiment) for u in result.units] == [
        ("4.1", -2),
        ("8.1", 1),
    ]


def test_per_task_stops_when_irrelevant(api_key: str, taxonomy: Taxonomy) -> None:
    calls = 0

    def handler(request: httpx.Request) -> httpx.Response:
        nonlocal calls
        calls += 1
        return _chat({"relevant": False})

    result = _run(
        _config(api_key, task_mode="per_task"), httpx.MockTransport(handler), taxonomy
    )
    assert calls == 1
    assert not result.relevant


def test_retry_notes_reach_diagnostics(api_key: str, taxonomy: Taxonomy) -> None:
    statuses = iter([503, 200])

    def handler(request: httpx.Request) -> httpx.Response:
        if next(statuses) == 503:
            return httpx.Response(503)
        return _chat({"relevant": False, "units": []})

    result = _run(_config(api_key), httpx.MockTransport(handler), taxonomy)
    assert result.diagnostics == ("attempt 1: HTTP 503",)


def test_few_shot_sampling_is_reproducible(
    api_key: str, tmp_path: Path, taxonomy: Taxonomy
) -> None:
    gold = _write_gold(tmp_path, 25)
    config = _config(api_key, mode="few_shot", exemplars_path=str(gold))
    prompts: list[str] = []

    def handler(request: httpx.Request) -> httpx.Response:
        prompts.append(_prompt(request))
        return _chat({"relevant": False, "units": []})

    async def go(seed: int) -> tuple[Exemplar, ...]:
        backend = LlmBackend.new(
            config, seed=seed, transport=httpx.MockTransport(handler)
        )
        try:
            await backend.extract(make_entry(), taxonomy)
            return backend.exemplars
        finally:
            await backend.aclose()

    first = asyncio.run(go(3))
    second = asyncio.run(go(3))
    assert len(first) == 10
    assert first == second
    assert prompts[0] == prompts[1]
    assert "Example 10" in prompts[0]


def test_few_shot_needs_exemplars(api_key: str) -> None:
    with pytest.raises(ValueError, match="exemplars_path"):
        LlmBackend.new(_config(api_key, mode="few_shot"))


def test_backend_modes(api_key: str) -> None:
    async def go(mode: str) -> BackendMode:
        backend = LlmBackend.new(_config(api_key, mode=mode))
        try:
            return backend.info.mode
        finally:
            await backend.aclose()

    assert asyncio.run(go("zero_shot")) is BackendMode.ZERO_SHOT
    assert asyncio.run(go("fine_tuned")) is BackendMode.FINE_TUNED


def test_sample_exemplars(tmp_path: Path) -> None:
    pool = load_exemplars(_write_gold(tmp_path, 20))
    picked = sample_exemplars(pool, 5, seed=11)
    assert picked == sample_exemplars(pool, 5, seed=11)
    assert len(picked) == 5
    positions = [pool.index(ex) for ex in picked]
    assert positions == sorted(positions)
    assert sample_exemplars(pool, 50, seed=0) == pool
    assert sample_exemplars(pool, 0, seed=0) == []
