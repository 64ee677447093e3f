"""
Greedy one-to-one alignment of predicted and gold units.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import StrEnum

from hqlens.model.unit import EvaluationUnit


class MatchLevel(StrEnum):
    """
    Granularity at which two units were paired.
    """

    INDICATOR = "indicator"
    CATEGORY = "category"


@dataclass(frozen=True, slots=True)
class UnitMatch:
    """
    One aligned (gold, predicted) pair.
    """

    gold: int
    """
    Index into the gold list.
    """

    predicted: int
    """
    Index into the prediction list.
    """

    level: MatchLevel
    """
    Pairing granularity.
    """


@dataclass(frozen=True, slots=True)
class Alignment:
    """
    Result of aligning one entry's units.
    """

    matches: tuple[UnitMatch, ...]
    missed: tuple[int, ...]
    """
    Gold indices left unmatched.
    """

    spurious: tuple[int, ...]
    """
    Prediction indices left unmatched.
    """

    def at(self, level: MatchLevel) -> tuple[UnitMatch, ...]:
        """
        Matches of one level.

        Parameters
        ----------
        level : MatchLevel
            Level to select.

        Returns
        -------
        tuple[UnitMatch, ...]
            Matches in gold order.
        """
        return tuple(m for m in self.matches if m.level is level)


def align_units(
    predicted: Sequence[EvaluationUnit], gold: Sequence[EvaluationUnit]
) -> Alignment:
    """
    Pair predicted with gold units of one entry.

    First pass pairs equal indicator ids, second pass equal categories. In
    each pass gold units are visited in order and take the first free
    prediction.

    Parameters
    ----------
    predicted : Sequence[EvaluationUnit]
        Predicted units.
    gold : Sequence[EvaluationUnit]
        Gold units.

    Returns
    -------
    Alignment
        Matches plus unmatched indices on both sides.
    """
    used_gold: set[int] = set()
    used_pred: set[int] = set()
    matches: list[UnitMatch] = []

    def sweep(
        level: MatchLevel, same: Callable[[EvaluationUnit, EvaluationUnit], bool]
    ) -> None:
        for gi, g in enumerate(gold):
            if gi in used_gold:
                continue
            for pi, p in enumerate(predicted):
                if pi not in used_pred and same(g, p):
                    used_gold.add(gi)
                    used_pred.add(pi)
                    matches.append(UnitMatch(gi, pi, level))
                    break

    sweep(MatchLevel.INDICATOR, lambda g, p: g.indicator_id == p.indicator_id)
    sweep(
        MatchLevel.CATEGORY,
        lambda g, p: g.indicator_id.category == p.indicator_id.category,
    )
    matches.sort(key=lambda m: m.gold)
    return Alignment(
        matches=tuple(matches),
        missed=tuple(k for k in range(len(gold)) if k not in used_gold),
        spurious=tuple(k for k in range(len(predicted)) if k not in used_pred),
    )
