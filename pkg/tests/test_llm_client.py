from __future__ import annotations

import asyncio
import json

import httpx
import pytest

from hqlens.config import LlmClientConfig
from hqlens.errors import AuthError, BackendUnavailableError, MalformedResponseError
from hqlens.extract.llm_client import LlmClient, call_llm


def _config(api_key: str, **overrides: object) -> LlmClientConfig:
    params: dict[str, object] = {
        "base_url": "https://llm.test/v1",
        "api_key_env": api_key,
        "backoff_base_s": 0.0,
    }
    params.update(overrides)
    return LlmClientConfig(**params)  # type: ignore[arg-type]


def _chat(text: str) -> httpx.Response:
    return httpx.Response(
        200, json={"choices": [{"message": {"role": "assistant", "content": text}}]}
    )


def test_fixed_reply(api_key: str) -> None:
    seen: list[httpx.Request] = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request)
        return _chat('{"relevant": false, "units": []}')

    text = asyncio.run(
        call_llm(_config(api_key), "hello", transport=httpx.MockTransport(handler))
    )
    assert text == '{"relevant": false, "units": []}'
    (request,) = seen
    assert str(request.url) == "https://llm.test/v1/chat/completions"
    assert request.headers["Authorization"] == "Bearer sk-test"
    body = json.loads(request.content)
    assert body["messages"][-1] == {"role": "user", "content": "hello"}
    assert body["temperature"] == 0.0


def test_rate_limit_then_success(api_key: str) -> None:
    statuses = iter([429, 429, 200])

    def handler(request: httpx.Request) -> httpx.Response:
        status = next(statuses)
        return _chat("ok") if status == 200 else httpx.Response(status)

    async def go() -> tuple[str, int, list[str]]:
        async with LlmClient.new(
            _config(api_key), transport=httpx.MockTransport(handler)
        ) as client:
            reply = await client.complete("p")
        return reply.text, reply.attempts, reply.diagnostics

    text, attempts, notes = asyncio.run(go())
    assert (text, attempts) == ("ok", 3)
    assert notes == ["attempt 1: HTTP 429", "attempt 2: HTTP 429"]


def test_retries_exhausted(api_key: str) -> None:
    calls = 0

    def handler(request: httpx.Request) -> httpx.Response:
        nonlocal calls
        calls += 1
        return httpx.Response(500)

    with pytest.raises(BackendUnavailableError, match="3 attempts"):
        asyncio.run(
            call_llm(
                _config(api_key, retries=2),
                "p",
                transport=httpx.MockTransport(handler),
            )
        )
    assert calls == 3


def test_transport_errors_are_retried(api_key: str) -> None:
    calls = 0

    def handler(request: httpx.Request) -> httpx.Response:
        nonlocal calls
        calls += 1
        if calls == 1:
            raise httpx.ConnectError("refused", request=request)
        return _chat("ok")

    text = asyncio.run(
        call_llm(_config(api_key), "p", transport=httpx.MockTransport(handler))
    )
    assert text == "ok"
    assert calls == 2


def test_auth_failure_is_not_retried(api_key: str) -> None:
    calls = 0

    def handler(request: httpx.Request) -> httpx.Response:
        nonlocal calls
        calls += 1
        return httpx.Response(401)

    with pytest.raises(AuthError):
        asyncio.run(
            call_llm(_config(api_key), "p", transport=httpx.MockTransport(handler))
        )
    assert calls == 1


def test_client_error_is_not_retried(api_key: str) -> None:
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(400, text="bad model")

    with pytest.raises(BackendUnavailableError, match="HTTP 400"):
        asyncio.run(
            call_llm(_config(api_key), "p", transport=httpx.MockTransport(handler))
        )


def test_missing_key(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("HQLENS_ABSENT_KEY", raising=False)
    with pytest.raises(AuthError, match="HQLENS_ABSENT_KEY"):
        LlmClient.new(_config("HQLENS_ABSENT_KEY"))


def test_no_auth_header_without_key_env() -> None:
    seen: list[httpx.Request] = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request)
        return _chat("ok")

    asyncio.run(call_llm(_config(""), "p", transport=httpx.MockTransport(handler)))
    assert "Authorization" not in seen[0].headers


def test_reply_without_content(api_key: str) -> None:
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"choices": []})

    with pytest.raises(MalformedResponseError):
        asyncio.run(
            call_llm(_config(api_key), "p", transport=httpx.MockTransport(handler))
        )


def test_in_flight_ceiling(api_key: str) -> None:
    active = 0
    peak = 0

    async def handler(request: httpx.Request) -> httpx.Response:
        nonlocal active, peak
        active += 1
        peak = max(peak, active)
        await asyncio.sleep(0.01)
        active -= 1
        return _chat("ok")

    async def go() -> list[str]:
        async with LlmClient.new(
            _config(api_key, max_in_flight=2), transport=httpx.MockTransport(handler)
        ) as client:
            replies = await asyncio.gather(
                *(client.complete(f"p{k}") for k in range(8))
            )
        return [r.text for r in replies]

    assert asyncio.run(go()) == ["ok"] * 8
    assert peak == 2


async def _serve_chat(
    reader: asyncio.StreamReader, writer: asyncio.StreamWriter
) -> None:
    head = await reader.readuntil(b"\r\n\r\n")
    length = 0
    for line in head.decode("latin-1").split("\r\n"):
        name, _, value = line.partition(":")
        if name.lower() == "content-length":
            length = int(value)
    prompt = json.loads(await reader.readexactly(length))["messages"][-1]["content"]
    body = json.dumps(
        {"choices": [{"message": {"role": "assistant", "content": prompt.upper()}}]}
    ).encode()
    writer.write(
        b"HTTP/1.1 200 OK\r\n"
        b"Content-Type: application/json\r\n"
        + f"Content-Length: {len(body)}\r\n".encode()
        + b"Connection: close\r\n\r\n"
        + body
    )
    await writer.drain()
    writer.close()
    await writer.wait_closed()


def test_local_stub_server(api_key: str) -> None:
    async def go() -> str:
        server = await asyncio.start_server(_serve_chat, host="127.0.0.1", port=0)
        port = server.sockets[0].getsockname()[1]
        async with server:
            return await call_llm(
                _config(api_key, base_url=f"http://127.0.0.1:{port}/v1"),
                "ping",
                transport=httpx.AsyncHTTPTransport(),
            )

    assert asyncio.run(go()) == "PING"
