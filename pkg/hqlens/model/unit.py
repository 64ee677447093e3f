"""
Evaluation units and their identifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .taxonomy import Taxonomy

_ID_RE = re.compile(r"^\s*(\d+)\.(\d+)\s*$")


class SentimentScore(IntEnum):
    """
    Five-point sentiment scale.
    """

    STRONGLY_NEGATIVE = -2
    NEGATIVE = -1
    NEUTRAL = 0
    POSITIVE = 1
    STRONGLY_POSITIVE = 2

    @classmethod
    def is_valid(cls, value: object) -> bool:
        """
        Check whether a raw value is a point of the scale.

        Parameters
        ----------
        value : object
            Candidate value.

        Returns
        -------
        bool
            True for the integers -2..2 (bools excluded).
        """
        if isinstance(value, bool) or not isinstance(value, int):
            return False
        return -2 <= value <= 2


@dataclass(frozen=True, slots=True, order=True)
class IndicatorId:
    """
    Dotted "category.indicator" identifier, ordered numerically.
    """

    category: int
    """
    Category ordinal, >= 1.
    """

    indicator: int
    """
    Indicator ordinal within the category, >= 1.
    """

    def __post_init__(self) -> None:
        """
        Validate ordinals.
        """
        if self.category < 1 or self.indicator < 1:
            raise ValueError(f"indicator ordinals must be >= 1: {self}")

    def __str__(self) -> str:
        """
        Render as "c.i".
        """
        return f"{self.category}.{self.indicator}"

    @classmethod
    def parse(cls, text: str) -> IndicatorId:
        """
        Parse "c.i".

        Parameters
        ----------
        text : str
            Dotted id.

        Returns
        -------
        IndicatorId
            Parsed id.

        Raises
        ------
        ValueError
            If the text is not a dotted pair of positive integers.
        """
        m = _ID_RE.match(str(text))
        if m is None:
            raise ValueError(f"not an indicator id: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


@dataclass(frozen=True, slots=True)
class EvaluationUnit:
    """
    Structured (object, content, indicator, sentiment) tuple from one post.

    Construction does not enforce invariants; use validate_unit.
    """

    entry_id: str
    """
    Id of the entry the unit was extracted from.
    """

    object_text: str
    """
    Evaluated object.
    """

    content_text: str
    """
    Content descriptor.
    """

    indicator_id: IndicatorId
    """
    Taxonomy indicator the content maps to.
    """

    sentiment: int
    """
    Score on the five-point scale.
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert unit to the JSON form shared by artifacts and model replies.

        Returns
        -------
        dict[str, Any]
            {"object", "content", "indicator", "sentiment"}.
        """
        return {
            "object": self.object_text,
            "content": self.content_text,
            "indicator": str(self.indicator_id),
            "sentiment": int(self.sentiment),
        }

    @classmethod
    def from_wire(cls, obj: dict[str, Any], *, entry_id: str) -> EvaluationUnit:
        """
        Parse the form produced by to_wire.

        Parameters
        ----------
        obj : dict[str, Any]
            Serialized unit.
        entry_id : str
            Owning entry id.

        Returns
        -------
        EvaluationUnit
            Parsed unit.
        """
        return cls(
            entry_id=entry_id,
            object_text=str(obj["object"]),
            content_text=str(obj["content"]),
            indicator_id=IndicatorId.parse(obj["indicator"]),
            sentiment=obj["sentiment"],
        )


def validate_unit(unit: EvaluationUnit, taxonomy: Taxonomy) -> list[str]:
    """
    Check a unit against its invariants.

    Parameters
    ----------
    unit : EvaluationUnit
        Unit to check.
    taxonomy : Taxonomy
        Active taxonomy.

    Returns
    -------
    list[str]
        Violations; empty when the unit is valid.
    """
    violations: list[str] = []
    if not unit.object_text.strip():
        violations.append("empty object text")
    if not unit.content_text.strip():
        violations.append("empty content text")
    if not taxonomy.has_indicator(unit.indicator_id):
        violations.append(f"unknown indicator {unit.indicator_id}")
    if not SentimentScore.is_valid(unit.sentiment):
        violations.append(f"sentiment out of range: {unit.sentiment!r}")
    return violations
