"""
Accuracy metrics and confusion matrices for extraction results.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

from hqlens.extract.backend import ExtractionResult

from .alignment import MatchLevel, align_units
from .gold import GoldAnnotation

NONE_LABEL = "none"
"""
Column for gold units without a counterpart.
"""

METRIC_NAMES = (
    "relevance_accuracy",
    "object_accuracy",
    "indicator_accuracy",
    "sentiment_exact_accuracy",
    "sentiment_within_one_accuracy",
    "unit_exact_accuracy",
    "unit_precision",
)


@dataclass(frozen=True, slots=True)
class ConfusionMatrix:
    """
    Counts of (gold label, predicted label) pairs.
    """

    rows: tuple[str, ...]
    """
    Gold labels.
    """

    columns: tuple[str, ...]
    """
    Predicted labels.
    """

    counts: tuple[tuple[int, ...], ...]
    """
    counts[r][c] for rows[r], columns[c].
    """

    @classmethod
    def tally(
        cls,
        pairs: Iterable[tuple[str, str]],
        rows: Sequence[str],
        columns: Sequence[str],
    ) -> ConfusionMatrix:
        """
        Build a matrix from label pairs.

        Parameters
        ----------
        pairs : Iterable[tuple[str, str]]
            (gold, predicted) labels.
        rows : Sequence[str]
            Row order.
        columns : Sequence[str]
            Column order.

        Returns
        -------
        ConfusionMatrix
            Matrix.
        """
        counter = Counter(pairs)
        return cls(
            rows=tuple(rows),
            columns=tuple(columns),
            counts=tuple(tuple(counter[(r, c)] for c in columns) for r in rows),
        )

    def row_total(self, label: str) -> int:
        """
        Sum of one gold row.

        Parameters
        ----------
        label : str
            Gold label.

        Returns
        -------
        int
            Row sum.
        """
        return sum(self.counts[self.rows.index(label)])

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            {"rows", "columns", "counts"}.
        """
        return {
            "rows": list(self.rows),
            "columns": list(self.columns),
            "counts": [list(r) for r in self.counts],
        }


@dataclass(frozen=True, slots=True)
class MetricsReport:
    """
    Accuracy of one backend against gold annotations.

    Ratios with an empty denominator are None.
    """

    entries: int
    gold_units: int
    predicted_units: int
    relevance_accuracy: float
    object_accuracy: float | None
    """
    Gold units paired at category level or finer.
    """

    indicator_accuracy: float | None
    sentiment_exact_accuracy: float | None
    """
    Over indicator-matched pairs.
    """

    sentiment_within_one_accuracy: float | None
    unit_exact_accuracy: float | None
    """
    Indicator-matched pairs with equal sentiment, over gold units.
    """

    unit_precision: float | None
    """
    Indicator-matched pairs over predicted units.
    """

    relevance_confusion: ConfusionMatrix
    sentiment_confusion: ConfusionMatrix
    category_confusion: ConfusionMatrix

    def metric(self, name: str) -> float | None:
        """
        Look up a ratio by name.

        Parameters
        ----------
        name : str
            One of METRIC_NAMES.

        Returns
        -------
        float | None
            Value.
        """
        if name not in METRIC_NAMES:
            raise KeyError(name)
        value: float | None = getattr(self, name)
        return value

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            Counts, ratios and confusion matrices.
        """
        return {
            "entries": self.entries,
            "gold_units": self.gold_units,
            "predicted_units": self.predicted_units,
            **{name: self.metric(name) for name in METRIC_NAMES},
            "confusion": {
                "relevance": self.relevance_confusion.to_wire(),
                "sentiment": self.sentiment_confusion.to_wire(),
                "category": self.category_confusion.to_wire(),
            },
        }


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def compute_metrics(
    pairs: Sequence[tuple[ExtractionResult, GoldAnnotation]],
) -> MetricsReport:
    """
    Score predictions against gold.

    Parameters
    ----------
    pairs : Sequence[tuple[ExtractionResult, GoldAnnotation]]
        Prediction and gold per entry.

    Returns
    -------
    MetricsReport
        Ratios and confusion matrices.

    Raises
    ------
    ValueError
        If pairs is empty or a pair mixes entries.
    """
    if not pairs:
        raise ValueError("metrics need at least one (prediction, gold) pair")

    relevance_hits = 0
    gold_units = predicted_units = 0
    category_hits = indicator_hits = 0
    exact = within_one = 0
    relevance_pairs: list[tuple[str, str]] = []
    sentiment_pairs: list[tuple[str, str]] = []
    category_pairs: list[tuple[str, str]] = []
    categories: set[int] = set()

    for pred, gold in pairs:
        if pred.entry_id != gold.entry.id:
            raise ValueError(f"prediction {pred.entry_id} paired with {gold.entry.id}")
        relevance_hits += pred.relevant == gold.relevant
        relevance_pairs.append((str(gold.relevant).lower(), str(pred.relevant).lower()))
        gold_units += len(gold.units)
        predicted_units += len(pred.units)
        categories.update(u.indicator_id.category for u in gold.units)
        categories.update(u.indicator_id.category for u in pred.units)

        alignment = align_units(pred.units, gold.units)
        for m in alignment.matches:
            g, p = gold.units[m.gold], pred.units[m.predicted]
            category_hits += 1
            category_pairs.append(
                (str(g.indicator_id.category), str(p.indicator_id.category))
            )
            if m.level is MatchLevel.INDICATOR:
                indicator_hits += 1
                delta = abs(int(g.sentiment) - int(p.sentiment))
                exact += delta == 0
                within_one += delta <= 1
                sentiment_pairs.append((str(g.sentiment), str(p.sentiment)))
            else:
                sentiment_pairs.append((str(g.sentiment), NONE_LABEL))
        for k in alignment.missed:
            g = gold.units[k]
            category_pairs.append((str(g.indicator_id.category), NONE_LABEL))
            sentiment_pairs.append((str(g.sentiment), NONE_LABEL))

    scale = [str(s) for s in range(-2, 3)]
    cats = [str(c) for c in sorted(categories)]
    return MetricsReport(
        entries=len(pairs),
        gold_units=gold_units,
        predicted_units=predicted_units,
        relevance_accuracy=relevance_hits / len(pairs),
        object_accuracy=_ratio(category_hits, gold_units),
        indicator_accuracy=_ratio(indicator_hits, gold_units),
        sentiment_exact_accuracy=_ratio(exact, indicator_hits),
        sentiment_within_one_accuracy=_ratio(within_one, indicator_hits),
        unit_exact_accuracy=_ratio(exact, gold_units),
        unit_precision=_ratio(indicator_hits, predicted_units),
        relevance_confusion=ConfusionMatrix.tally(
            relevance_pairs, ["true", "false"], ["true", "false"]
        ),
        sentiment_confusion=ConfusionMatrix.tally(
            sentiment_pairs, scale, [*scale, NONE_LABEL]
        ),
        category_confusion=ConfusionMatrix.tally(
            category_pairs, cats, [*cats, NONE_LABEL]
        ),
    )
