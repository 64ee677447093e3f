"""
Chat-model extraction backend in zero-shot, few-shot and fine-tuned modes.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import httpx
import numpy as np

from hqlens.config import LlmClientConfig
from hqlens.errors import MalformedResponseError
from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Taxonomy

from .backend import BackendInfo, BackendMode, ExtractionResult
from .llm_client import LlmClient
from .prompts import Exemplar, PromptTask, build_prompt
from .response import (
    parse_extraction,
    parse_llm_response,
    parse_relevance,
    parse_sentiments,
)

logger = logging.getLogger(__name__)


def load_exemplars(path: str | Path) -> list[Exemplar]:
    """
    Read an exemplar pool from a gold annotation file.

    Parameters
    ----------
    path : str | Path
        JSON-lines gold file, one {"entry", "relevant", "units"} per line.

    Returns
    -------
    list[Exemplar]
        Pool in file order.

    Raises
    ------
    ValueError
        If a line cannot be decoded.
    """
    pool: list[Exemplar] = []
    p = Path(path)
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            entry = Entry.from_wire(obj["entry"])
            result = ExtractionResult.from_wire(
                {
                    "entry_id": entry.id,
                    "relevant": obj["relevant"],
                    "units": obj["units"],
                }
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{p}:{lineno}: bad gold record: {exc}") from exc
        pool.append(Exemplar(text=entry.text, result=result))
    return pool


def sample_exemplars(pool: Sequence[Exemplar], n: int, seed: int) -> list[Exemplar]:
    """
    Draw few-shot exemplars reproducibly.

    Parameters
    ----------
    pool : Sequence[Exemplar]
        Candidates.
    n : int
        Number wanted; the whole pool is used when it is smaller.
    seed : int
        Run seed.

    Returns
    -------
    list[Exemplar]
        Chosen exemplars, in pool order.
    """
    if n <= 0 or not pool:
        return []
    if n >= len(pool):
        return list(pool)
    rng = np.random.default_rng(seed)
    picked = sorted(int(k) for k in rng.choice(len(pool), size=n, replace=False))
    return [pool[k] for k in picked]


_MODES = {
    "zero_shot": BackendMode.ZERO_SHOT,
    "few_shot": BackendMode.FEW_SHOT,
    "fine_tuned": BackendMode.FINE_TUNED,
}


@dataclass(slots=True)
class LlmBackend:
    """
    Extraction through a chat-completion endpoint.

    A fine-tuned model is used by pointing config.model at it; prompts are
    the zero-shot ones.
    """

    config: LlmClientConfig
    """
    Endpoint, mode and parsing settings.
    """

    client: LlmClient
    """
    Shared connection; bounds in-flight requests across callers.
    """

    exemplars: tuple[Exemplar, ...] = ()
    """
    Few-shot exemplars; empty in the other modes.
    """

    name: str = "llm"
    """
    Column label.
    """

    @classmethod
    def new(
        cls,
        config: LlmClientConfig,
        *,
        seed: int = 0,
        name: str = "llm",
        transport: httpx.AsyncBaseTransport | None = None,
    ) -> LlmBackend:
        """
        Construct a backend and its client.

        Parameters
        ----------
        config : LlmClientConfig
            Backend settings.
        seed : int
            Seed for exemplar sampling.
        name : str
            Column label.
        transport : httpx.AsyncBaseTransport | None
            Custom transport, e.g. a stub in tests.

        Returns
        -------
        LlmBackend
            Ready backend. Close it with aclose().
        """
        exemplars: list[Exemplar] = []
        if config.mode == "few_shot":
            if config.exemplars_path is None:
                raise ValueError("few_shot mode needs exemplars_path")
            exemplars = sample_exemplars(
                load_exemplars(config.exemplars_path), config.exemplar_count, seed
            )
            logger.info("Using %d few-shot exemplars", len(exemplars))
        return cls(
            config=config,
            client=LlmClient.new(config, transport=transport),
            exemplars=tuple(exemplars),
            name=name,
        )

    @property
    def info(self) -> BackendInfo:
        """
        Capability descriptor.
        """
        return BackendInfo(name=self.name, mode=_MODES[self.config.mode])

    async def aclose(self) -> None:
        """
        Close the client.

        Returns
        -------
        None
        """
        await self.client.aclose()

    async def _ask(self, prompt: str, notes: list[str]) -> str:
        """
        Send a prompt, collecting retry notes.
        """
        reply = await self.client.complete(prompt)
        notes.extend(reply.diagnostics)
        return reply.text

    async def extract(self, entry: Entry, taxonomy: Taxonomy) -> ExtractionResult:
        """
        Judge relevance and extract units from one entry.

        Parameters
        ----------
        entry : Entry
            Post to analyze.
        taxonomy : Taxonomy
            Active taxonomy.

        Returns
        -------
        ExtractionResult
            Parsed result; retry and drop notes in diagnostics.

        Raises
        ------
        BackendUnavailableError
            When the endpoint cannot be reached.
        MalformedResponseError
            When a reply cannot be parsed.
        """
        if self.config.task_mode == "per_task":
            return await self._extract_per_task(entry, taxonomy)

        notes: list[str] = []
        text = await self._ask(
            build_prompt(PromptTask.COMBINED, entry, taxonomy, self.exemplars), notes
        )
        result = parse_llm_response(
            text, taxonomy, entry_id=entry.id, strict=self.config.strict
        )
        return replace(result, diagnostics=tuple(notes) + result.diagnostics)

    async def _extract_per_task(
        self, entry: Entry, taxonomy: Taxonomy
    ) -> ExtractionResult:
        """
        Run relevance, extraction and sentiment as three calls.
        """
        notes: list[str] = []
        relevant = parse_relevance(
            await self._ask(
                build_prompt(PromptTask.RELEVANCE, entry, taxonomy, self.exemplars),
                notes,
            )
        )
        if not relevant:
            return ExtractionResult(entry.id, False, (), tuple(notes))

        units, dropped = parse_extraction(
            await self._ask(
                build_prompt(PromptTask.EXTRACTION, entry, taxonomy, self.exemplars),
                notes,
            ),
            taxonomy,
            entry_id=entry.id,
            strict=self.config.strict,
        )
        notes.extend(dropped)
        if not units:
            return ExtractionResult(entry.id, True, (), tuple(notes))

        prompt = build_prompt(
            PromptTask.SENTIMENT, entry, taxonomy, self.exemplars, units=units
        )
        try:
            scores = parse_sentiments(await self._ask(prompt, notes), len(units))
        except MalformedResponseError as exc:
            exc.diagnostics = notes + exc.diagnostics
            raise
        return ExtractionResult(
            entry_id=entry.id,
            relevant=True,
            units=tuple(
                replace(u, sentiment=s)
                for u, s in zip(units, scores, strict=True)
            ),
            diagnostics=tuple(notes),
        )
