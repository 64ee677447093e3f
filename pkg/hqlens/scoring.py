"""
Community and citywide housing-quality scores.

A community's total is the weighted sum of |S_i + 3| over all indicators,
with unmentioned indicators scored neutral (S_i = 0). Totals lie in [1, 5].
"""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit, IndicatorId
from hqlens.weights import WeightTable

logger = logging.getLogger(__name__)

NEUTRAL_SHIFT = 3.0
"""
Offset mapping the -2..2 sentiment scale onto the 1..5 score scale.
"""

WEIGHT_SUM_TOLERANCE = 1e-9

SCORE_COLUMNS = ("community_id", "total", "coverage")


@dataclass(frozen=True, slots=True)
class CommunitySentiment:
    """
    Mean sentiment per mentioned indicator within one community.
    """

    community_id: str
    """
    Community the units were assigned to.
    """

    means: dict[IndicatorId, float]
    """
    Mean unit sentiment S_i, mentioned indicators only.
    """

    unit_count: int = 0
    """
    Units underlying the means.
    """

    @property
    def mentioned(self) -> frozenset[IndicatorId]:
        """
        Indicators with at least one unit.
        """
        return frozenset(self.means)


@dataclass(frozen=True, slots=True)
class CommunityScore:
    """
    Total score of one community.
    """

    community_id: str
    """
    Scored community.
    """

    total: float
    """
    Score in [1, 5].
    """

    contributions: dict[IndicatorId, float] = field(default_factory=dict)
    """
    W_i * |S_i + 3| per indicator.
    """

    coverage: float = 0.0
    """
    Share of taxonomy indicators mentioned.
    """


def community_sentiment(
    community_id: str, units: Iterable[EvaluationUnit]
) -> CommunitySentiment:
    """
    Average unit sentiments per indicator.

    Parameters
    ----------
    community_id : str
        Community the units belong to.
    units : Iterable[EvaluationUnit]
        Validated units assigned to the community.

    Returns
    -------
    CommunitySentiment
        Means over mentioned indicators.
    """
    values: dict[IndicatorId, list[int]] = defaultdict(list)
    count = 0
    for unit in units:
        values[unit.indicator_id].append(int(unit.sentiment))
        count += 1
    means = {k: math.fsum(v) / len(v) for k, v in sorted(values.items())}
    return CommunitySentiment(community_id=community_id, means=means, unit_count=count)


def total_score(sentiment: CommunitySentiment, weights: WeightTable) -> CommunityScore:
    """
    Weighted total with neutral fill.

    Parameters
    ----------
    sentiment : CommunitySentiment
        Community means.
    weights : WeightTable
        Weights covering the taxonomy, summing to 1.

    Returns
    -------
    CommunityScore
        Total in [1, 5] plus per-indicator contributions.

    Raises
    ------
    ValueError
        If the weights do not sum to 1 or a mentioned indicator has no weight.
    """
    weight_sum = weights.total()
    if abs(weight_sum - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ValueError(f"weights sum to {weight_sum!r}, not 1")
    missing = sentiment.mentioned - weights.weights.keys()
    if missing:
        raise ValueError(f"no weight for indicators {sorted(map(str, missing))}")

    contributions: dict[IndicatorId, float] = {}
    shifted: list[float] = []
    for ind_id, w in weights.weights.items():
        s = sentiment.means.get(ind_id, 0.0)
        contributions[ind_id] = w * abs(s + NEUTRAL_SHIFT)
        shifted.append(w * s)

    # 3 + sum(W_i * S_i) / sum(W_i); keeps the 1, 3 and 5 endpoints exact.
    total = NEUTRAL_SHIFT + math.fsum(shifted) / weight_sum
    total = min(5.0, max(1.0, total))
    coverage = len(sentiment.mentioned) / len(weights.weights)
    return CommunityScore(
        community_id=sentiment.community_id,
        total=total,
        contributions=contributions,
        coverage=coverage,
    )


def score_communities(
    units_by_community: Mapping[str, Sequence[EvaluationUnit]],
    weights: WeightTable,
) -> list[CommunityScore]:
    """
    Score every community that has at least one unit.

    Parameters
    ----------
    units_by_community : Mapping[str, Sequence[EvaluationUnit]]
        Assigned units per community id.
    weights : WeightTable
        Indicator weights.

    Returns
    -------
    list[CommunityScore]
        Scores ordered by community id.
    """
    return [
        total_score(community_sentiment(cid, units), weights)
        for cid, units in sorted(units_by_community.items())
        if units
    ]


@dataclass(frozen=True, slots=True)
class CategoryPerformance:
    """
    How one category fared across covered communities.
    """

    category_id: int
    name: str
    mean_contribution: float
    """
    Mean over communities of the category's summed contributions.
    """

    mean_score: float | None
    """
    Mean of the weight-normalized 1..5 category score; None without weight.
    """

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            Category performance record.
        """
        return {
            "category": self.category_id,
            "name": self.name,
            "mean_contribution": self.mean_contribution,
            "mean_score": self.mean_score,
        }


@dataclass(frozen=True, slots=True)
class CitySummary:
    """
    Citywide aggregate over covered communities.
    """

    mean_total: float
    deciles: tuple[float, ...]
    """
    10th to 90th percentile of totals.
    """

    categories: tuple[CategoryPerformance, ...]
    """
    Categories ranked best first.
    """

    covered: int
    total_communities: int

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            Summary document.
        """
        return {
            "mean_total": self.mean_total,
            "deciles": list(self.deciles),
            "category_ranking": [c.to_wire() for c in self.categories],
            "covered_communities": self.covered,
            "total_communities": self.total_communities,
        }


def city_summary(
    scores: Sequence[CommunityScore],
    taxonomy: Taxonomy,
    *,
    weights: WeightTable | None = None,
    total_communities: int | None = None,
) -> CitySummary:
    """
    Summarize community scores citywide.

    Parameters
    ----------
    scores : Sequence[CommunityScore]
        Scores of covered communities.
    taxonomy : Taxonomy
        Category structure.
    weights : WeightTable | None
        Weights used for scoring; enables per-category 1..5 scores.
    total_communities : int | None
        Number of known communities; defaults to len(scores).

    Returns
    -------
    CitySummary
        Mean total, deciles, category ranking and coverage counts.

    Raises
    ------
    ValueError
        If scores is empty.
    """
    if not scores:
        raise ValueError("city summary needs at least one community score")
    totals = np.array([s.total for s in scores], dtype=float)
    deciles = tuple(float(q) for q in np.percentile(totals, np.arange(10, 100, 10)))

    performance: list[CategoryPerformance] = []
    for cat in taxonomy.categories:
        ids = [ind.id for ind in taxonomy.indicators_in(cat.id)]
        sums = [math.fsum(s.contributions.get(i, 0.0) for i in ids) for s in scores]
        mean_contribution = math.fsum(sums) / len(sums)
        mean_score: float | None = None
        if weights is not None:
            w_cat = math.fsum(weights.weight(i) for i in ids)
            if w_cat > 0:
                mean_score = mean_contribution / w_cat
        performance.append(
            CategoryPerformance(cat.id, cat.name, mean_contribution, mean_score)
        )

    def rank_key(p: CategoryPerformance) -> tuple[float, int]:
        if weights is None:
            return (-p.mean_contribution, p.category_id)
        value = p.mean_score if p.mean_score is not None else -math.inf
        return (-value, p.category_id)

    performance.sort(key=rank_key)
    return CitySummary(
        mean_total=math.fsum(s.total for s in scores) / len(scores),
        deciles=deciles,
        categories=tuple(performance),
        covered=len(scores),
        total_communities=total_communities
        if total_communities is not None
        else len(scores),
    )


def write_scores_csv(path: str | Path, scores: Sequence[CommunityScore]) -> None:
    """
    Write community scores as CSV (community_id, total, coverage).

    Parameters
    ----------
    path : str | Path
        Destination.
    scores : Sequence[CommunityScore]
        Scores to write.

    Returns
    -------
    None
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORE_COLUMNS)
        for s in sorted(scores, key=lambda x: x.community_id):
            writer.writerow([s.community_id, repr(s.total), repr(s.coverage)])


def read_scores_csv(path: str | Path) -> list[CommunityScore]:
    """
    Read a scores CSV.

    Contributions are not part of the file and come back empty.

    Parameters
    ----------
    path : str | Path
        CSV written by write_scores_csv.

    Returns
    -------
    list[CommunityScore]
        Scores in file order.
    """
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SCORE_COLUMNS:
            raise ValueError(f"{path}: unexpected score table header")
        return [
            CommunityScore(
                community_id=row["community_id"],
                total=float(row["total"] or ""),
                coverage=float(row["coverage"] or ""),
            )
            for row in reader
        ]
