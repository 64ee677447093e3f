"""
Backend replaying extraction results from a JSON-lines file.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from hqlens.errors import MissingPredictionError
from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Taxonomy

from .backend import BackendInfo, BackendMode, ExtractionResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PredictionFileBackend:
    """
    Passthrough of externally produced predictions.

    Used for classifier baselines and as an oracle column when pointed at
    gold annotations.
    """

    predictions: dict[str, ExtractionResult]
    """
    Results keyed by entry id.
    """

    name: str = "predictions"
    """
    Column label.
    """

    @classmethod
    def load(
        cls, path: str | Path, *, name: str | None = None
    ) -> PredictionFileBackend:
        """
        Read a prediction file.

        Lines are either serialized ExtractionResult objects or gold records
        ({"entry", "relevant", "units"}). A later line for the same entry
        replaces an earlier one.

        Parameters
        ----------
        path : str | Path
            JSON-lines file.
        name : str | None
            Column label; defaults to the file stem.

        Returns
        -------
        PredictionFileBackend
            Loaded backend.

        Raises
        ------
        ValueError
            If a line cannot be decoded.
        """
        p = Path(path)
        predictions: dict[str, ExtractionResult] = {}
        for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if "entry_id" not in obj and "entry" in obj:
                    obj = {
                        "entry_id": obj["entry"]["id"],
                        "relevant": obj["relevant"],
                        "units": obj.get("units", []),
                    }
                result = ExtractionResult.from_wire(obj)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{p}:{lineno}: bad prediction record: {exc}") from exc
            predictions[result.entry_id] = result
        logger.debug("Loaded %d predictions from %s", len(predictions), p)
        return cls(predictions=predictions, name=name or p.stem)

    @property
    def info(self) -> BackendInfo:
        """
        Capability descriptor.
        """
        return BackendInfo(name=self.name, mode=BackendMode.PREDICTION_FILE)

    async def extract(self, entry: Entry, taxonomy: Taxonomy) -> ExtractionResult:
        """
        Return the stored result for an entry.

        Parameters
        ----------
        entry : Entry
            Entry to look up.
        taxonomy : Taxonomy
            Unused; results are checked by the caller.

        Returns
        -------
        ExtractionResult
            Stored result.

        Raises
        ------
        MissingPredictionError
            If the file has no line for the entry.
        """
        try:
            return self.predictions[entry.id]
        except KeyError:
            raise MissingPredictionError(entry.id) from None
