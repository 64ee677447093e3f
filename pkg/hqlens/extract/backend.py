"""
Extraction backend contract and result type.
"""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import Any, Protocol

from hqlens.errors import MalformedResponseError, MissingPredictionError
from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit, validate_unit

logger = logging.getLogger(__name__)


class BackendMode(StrEnum):
    """
    How a backend produces its results.
    """

    ZERO_SHOT = "zero_shot"
    FEW_SHOT = "few_shot"
    FINE_TUNED = "fine_tuned"
    RULE_BASED = "rule_based"
    PREDICTION_FILE = "prediction_file"


@dataclass(frozen=True, slots=True)
class BackendInfo:
    """
    Capability descriptor of a backend.
    """

    name: str
    """
    Short backend name, used as default column label.
    """

    mode: BackendMode
    """
    Production mode.
    """


@dataclass(frozen=True, slots=True)
class ExtractionResult:
    """
    Relevance judgement plus structured units for one entry.
    """

    entry_id: str
    """
    Entry the result belongs to.
    """

    relevant: bool
    """
    Whether the post discusses housing quality.
    """

    units: tuple[EvaluationUnit, ...] = ()
    """
    Extracted units; empty when not relevant.
    """

    diagnostics: tuple[str, ...] = field(default=(), compare=False)
    """
    Free-form notes (retries, dropped units, failures).
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to the JSON-lines artifact form.

        Returns
        -------
        dict[str, Any]
            {"entry_id", "relevant", "units", "diagnostics"}.
        """
        return {
            "entry_id": self.entry_id,
            "relevant": self.relevant,
            "units": [u.to_wire() for u in self.units],
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_wire(cls, obj: dict[str, Any]) -> ExtractionResult:
        """
        Parse the form produced by to_wire.

        Parameters
        ----------
        obj : dict[str, Any]
            Serialized result.

        Returns
        -------
        ExtractionResult
            Parsed result.
        """
        entry_id = str(obj["entry_id"])
        return cls(
            entry_id=entry_id,
            relevant=bool(obj["relevant"]),
            units=tuple(
                EvaluationUnit.from_wire(u, entry_id=entry_id)
                for u in obj.get("units", [])
            ),
            diagnostics=tuple(str(d) for d in obj.get("diagnostics", [])),
        )

    def checked(self, taxonomy: Taxonomy) -> ExtractionResult:
        """
        Enforce the result invariants against a taxonomy.

        Invalid units are dropped and noted in the diagnostics; units of an
        irrelevant result are discarded.

        Parameters
        ----------
        taxonomy : Taxonomy
            Active taxonomy.

        Returns
        -------
        ExtractionResult
            Result whose units all pass validate_unit.
        """
        notes = list(self.diagnostics)
        if not self.relevant:
            if self.units:
                notes.append(f"discarded {len(self.units)} units of irrelevant entry")
                return replace(self, units=(), diagnostics=tuple(notes))
            return self

        kept: list[EvaluationUnit] = []
        for unit in self.units:
            violations = validate_unit(unit, taxonomy)
            if violations:
                notes.append(f"dropped unit {unit.to_wire()}: {'; '.join(violations)}")
                continue
            kept.append(unit)
        if len(kept) == len(self.units):
            return self
        return replace(self, units=tuple(kept), diagnostics=tuple(notes))


class ExtractionBackend(Protocol):
    """
    Interchangeable producer of extraction results.

    Given the same entry and configuration a backend returns the same
    result; the llm backend does so only at sampling temperature 0.
    """

    @property
    def info(self) -> BackendInfo:
        """
        Capability descriptor.
        """
        ...

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
            Result for the entry.
        """
        ...


async def extract(
    backend: ExtractionBackend, entry: Entry, taxonomy: Taxonomy
) -> ExtractionResult:
    """
    Run a backend on one entry and enforce the result invariants.

    Parameters
    ----------
    backend : ExtractionBackend
        Backend to run.
    entry : Entry
        Post to analyze.
    taxonomy : Taxonomy
        Validated taxonomy.

    Returns
    -------
    ExtractionResult
        Result whose units all exist in the taxonomy with in-range sentiments.

    Raises
    ------
    BackendUnavailableError
        If a remote backend cannot be reached.
    MalformedResponseError
        If a remote backend's reply cannot be parsed.
    """
    result = await backend.extract(entry, taxonomy)
    checked = result.checked(taxonomy)
    if checked is not result:
        logger.debug(
            "Backend %s output for %s needed repair", backend.info.name, entry.id
        )
    return checked


async def extract_many(
    backend: ExtractionBackend,
    entries: Sequence[Entry],
    taxonomy: Taxonomy,
    *,
    workers: int = 4,
    missing: list[str] | None = None,
) -> list[ExtractionResult]:
    """
    Run a backend over many entries concurrently.

    An entry whose reply is malformed is recorded as irrelevant with the
    failure in its diagnostics.

    Parameters
    ----------
    backend : ExtractionBackend
        Backend to run.
    entries : Sequence[Entry]
        Entries to process.
    taxonomy : Taxonomy
        Validated taxonomy.
    workers : int
        Maximum concurrent extract calls.
    missing : list[str] | None
        When given, ids without a stored prediction are appended here and
        skipped instead of raising.

    Returns
    -------
    list[ExtractionResult]
        Results ordered by entry id.

    Raises
    ------
    BackendUnavailableError
        If a remote backend cannot be reached.
    MissingPredictionError
        If a prediction is absent and missing is None.
    """
    gate = asyncio.Semaphore(max(1, workers))

    async def one(entry: Entry) -> ExtractionResult | None:
        async with gate:
            try:
                return await extract(backend, entry, taxonomy)
            except MalformedResponseError as exc:
                logger.warning("Malformed reply for %s: %s", entry.id, exc)
                return ExtractionResult(
                    entry_id=entry.id,
                    relevant=False,
                    diagnostics=(f"malformed_response: {exc}", *exc.diagnostics),
                )
            except MissingPredictionError:
                if missing is None:
                    raise
                missing.append(entry.id)
                return None

    results = await asyncio.gather(*(one(e) for e in entries))
    if missing is not None:
        missing.sort()
    return sorted((r for r in results if r is not None), key=lambda r: r.entry_id)
