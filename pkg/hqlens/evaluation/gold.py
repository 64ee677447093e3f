"""
Gold annotations.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from hqlens.extract.backend import ExtractionResult
from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit, validate_unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class GoldAnnotation:
    """
    Manually annotated entry.
    """

    entry: Entry
    """
    Annotated post.
    """

    relevant: bool
    """
    Gold relevance flag.
    """

    units: tuple[EvaluationUnit, ...] = ()
    """
    Gold units; empty when not relevant.
    """

    def as_result(self) -> ExtractionResult:
        """
        View the annotation as an extraction result.

        Returns
        -------
        ExtractionResult
            Result with the gold flag and units.
        """
        return ExtractionResult(self.entry.id, self.relevant, self.units)

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to the gold-file line form.

        Returns
        -------
        dict[str, Any]
            {"entry", "relevant", "units"}.
        """
        return {
            "entry": self.entry.to_wire(),
            "relevant": self.relevant,
            "units": [u.to_wire() for u in self.units],
        }

    @classmethod
    def from_wire(cls, obj: dict[str, Any]) -> GoldAnnotation:
        """
        Parse one gold-file line.

        Parameters
        ----------
        obj : dict[str, Any]
            Decoded line.

        Returns
        -------
        GoldAnnotation
            Annotation.
        """
        entry = Entry.from_wire(obj["entry"])
        return cls(
            entry=entry,
            relevant=bool(obj["relevant"]),
            units=tuple(
                EvaluationUnit.from_wire(u, entry_id=entry.id)
                for u in obj.get("units", [])
            ),
        )


def load_gold(path: str | Path, taxonomy: Taxonomy) -> list[GoldAnnotation]:
    """
    Read and check a gold file.

    Parameters
    ----------
    path : str | Path
        JSON-lines file, one annotation per line.
    taxonomy : Taxonomy
        Taxonomy the units must satisfy.

    Returns
    -------
    list[GoldAnnotation]
        Annotations ordered by entry id.

    Raises
    ------
    ValueError
        If a line is malformed, an entry id repeats, or a unit is invalid.
    """
    p = Path(path)
    seen: dict[str, GoldAnnotation] = {}
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            gold = GoldAnnotation.from_wire(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{p}:{lineno}: bad gold record: {exc}") from exc
        if gold.entry.id in seen:
            raise ValueError(f"{p}:{lineno}: duplicate gold entry {gold.entry.id}")
        if not gold.relevant and gold.units:
            raise ValueError(f"{p}:{lineno}: irrelevant entry carries units")
        for unit in gold.units:
            violations = validate_unit(unit, taxonomy)
            if violations:
                raise ValueError(f"{p}:{lineno}: {'; '.join(violations)}")
        seen[gold.entry.id] = gold
    logger.debug("Loaded %d gold annotations from %s", len(seen), p)
    return [seen[k] for k in sorted(seen)]
