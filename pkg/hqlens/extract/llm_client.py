"""
Chat-completion HTTP client with bounded parallelism and retries.
"""

from __future__ import annotations

import asyncio
import logging
import os
from dataclasses import dataclass, field
from types import TracebackType
from typing import Any

import httpx

from hqlens.config import LlmClientConfig
from hqlens.errors import AuthError, BackendUnavailableError, MalformedResponseError

from .prompts import SYSTEM_PROMPT

logger = logging.getLogger(__name__)

RETRYABLE_STATUS_CODES = frozenset({429, 500, 502, 503, 504})
AUTH_STATUS_CODES = frozenset({401, 403})


@dataclass(slots=True)
class LlmReply:
    """
    Assistant text plus transport bookkeeping.
    """

    text: str
    """
    Assistant message content, verbatim.
    """

    attempts: int
    """
    Requests sent, including the successful one.
    """

    diagnostics: list[str] = field(default_factory=list)
    """
    One note per failed attempt.
    """


@dataclass(slots=True)
class LlmClient:
    """
    Connection to a chat-completion endpoint.

    At most config.max_in_flight requests are outstanding at any time,
    whichever task issues them.
    """

    config: LlmClientConfig
    """
    Endpoint and retry settings.
    """

    _http: httpx.AsyncClient
    """
    Underlying HTTP client.
    """

    _gate: asyncio.Semaphore
    """
    In-flight request limiter.
    """

    _headers: dict[str, str]
    """
    Request headers, including authorization.
    """

    @classmethod
    def new(
        cls,
        config: LlmClientConfig,
        *,
        transport: httpx.AsyncBaseTransport | None = None,
    ) -> LlmClient:
        """
        Construct a client.

        Parameters
        ----------
        config : LlmClientConfig
            Endpoint and retry settings. An empty api_key_env sends no
            authorization header.
        transport : httpx.AsyncBaseTransport | None
            Custom transport, e.g. a stub in tests.

        Returns
        -------
        LlmClient
            Ready client.

        Raises
        ------
        AuthError
            If the configured key variable is not set.
        """
        headers = {"Content-Type": "application/json"}
        if config.api_key_env:
            key = os.environ.get(config.api_key_env)
            if not key:
                raise AuthError(
                    f"environment variable {config.api_key_env} holds no API key"
                )
            headers["Authorization"] = f"Bearer {key}"

        http = httpx.AsyncClient(
            timeout=httpx.Timeout(config.timeout_s),
            limits=httpx.Limits(max_connections=config.max_in_flight),
            transport=transport,
        )
        return cls(
            config=config,
            _http=http,
            _gate=asyncio.Semaphore(config.max_in_flight),
            _headers=headers,
        )

    async def __aenter__(self) -> LlmClient:
        """
        Enter the client context.
        """
        return self

    async def __aexit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        """
        Close the client on context exit.
        """
        await self.aclose()

    async def aclose(self) -> None:
        """
        Close the underlying HTTP client.

        Returns
        -------
        None
        """
        await self._http.aclose()

    @property
    def url(self) -> str:
        """
        Chat-completion endpoint URL.
        """
        return self.config.base_url.rstrip("/") + "/chat/completions"

    def _body(self, prompt: str) -> dict[str, Any]:
        """
        Build the request body.

        Parameters
        ----------
        prompt : str
            User prompt.

        Returns
        -------
        dict[str, Any]
            Chat-completion request.
        """
        return {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": prompt},
            ],
            "temperature": self.config.temperature,
        }

    @staticmethod
    def _content(response: httpx.Response) -> str:
        """
        Pull the assistant text out of a chat-completion response.

        Parameters
        ----------
        response : httpx.Response
            Successful response.

        Returns
        -------
        str
            Assistant message content.
        """
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(
                "chat-completion response lacks assistant content",
                [response.text[:200]],
            ) from exc
        if not isinstance(content, str):
            raise MalformedResponseError(
                "assistant content is not text", [repr(content)[:200]]
            )
        return content

    async def complete(self, prompt: str) -> LlmReply:
        """
        Send one prompt and return the assistant reply.

        Transport errors and 429 / 5xx responses are retried with
        exponential backoff; 401 / 403 fail immediately.

        Parameters
        ----------
        prompt : str
            User prompt.

        Returns
        -------
        LlmReply
            Reply text and attempt log.

        Raises
        ------
        AuthError
            On 401 / 403.
        BackendUnavailableError
            When retries are exhausted or the endpoint answers another error.
        MalformedResponseError
            When a 200 response carries no assistant text.
        """
        cfg = self.config
        body = self._body(prompt)
        notes: list[str] = []
        attempts_allowed = cfg.retries + 1

        for attempt in range(1, attempts_allowed + 1):
            async with self._gate:
                try:
                    response = await self._http.post(
                        self.url, json=body, headers=self._headers
                    )
                except httpx.TransportError as exc:
                    failure = f"attempt {attempt}: {type(exc).__name__}: {exc}"
                else:
                    status = response.status_code
                    if status in AUTH_STATUS_CODES:
                        raise AuthError(f"endpoint refused credentials (HTTP {status})")
                    if status < 400:
                        return LlmReply(
                            text=self._content(response),
                            attempts=attempt,
                            diagnostics=notes,
                        )
                    if status not in RETRYABLE_STATUS_CODES:
                        raise BackendUnavailableError(
                            f"endpoint answered HTTP {status}: {response.text[:200]}"
                        )
                    failure = f"attempt {attempt}: HTTP {status}"

            notes.append(failure)
            if attempt == attempts_allowed:
                break
            delay = cfg.backoff_base_s * (2 ** (attempt - 1))
            logger.debug("%s, retrying in %.2fs", failure, delay)
            await asyncio.sleep(delay)

        raise BackendUnavailableError(
            f"{self.url} unavailable after {attempts_allowed} attempts: {notes[-1]}"
        )


async def call_llm(
    config: LlmClientConfig,
    prompt: str,
    *,
    transport: httpx.AsyncBaseTransport | None = None,
) -> str:
    """
    Send one prompt with a short-lived client.

    Parameters
    ----------
    config : LlmClientConfig
        Endpoint and retry settings.
    prompt : str
        User prompt.
    transport : httpx.AsyncBaseTransport | None
        Custom transport, e.g. a stub in tests.

    Returns
    -------
    str
        Assistant text, verbatim.
    """
    async with LlmClient.new(config, transport=transport) as client:
        reply = await client.complete(prompt)
    return reply.text
