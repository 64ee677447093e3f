"""
Indicator statistics and the frequency-importance weight table.

An indicator's mass is its importance times its (log) frequency; its
weight is its share of the total mass.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from hqlens.config import WeightConfig
from hqlens.errors import DegenerateMassError
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit, IndicatorId

logger = logging.getLogger(__name__)

WEIGHT_COLUMNS = ("indicator_id", "F", "F'", "I", "W")


@dataclass(frozen=True, slots=True)
class IndicatorStats:
    """
    Frequency and sentiment statistics of one indicator.
    """

    indicator_id: IndicatorId
    """
    Indicator the row describes.
    """

    frequency: int
    """
    Number of units on the indicator.
    """

    mean_abs_sentiment: float = 0.0
    """
    Mean of per-unit absolute sentiments.
    """

    abs_mean_sentiment: float = 0.0
    """
    Absolute value of the mean sentiment.
    """

    mean_sentiment: float = 0.0
    """
    Mean sentiment.
    """

    def importance(self, mode: str) -> float:
        """
        Importance under an aggregation mode.

        Parameters
        ----------
        mode : str
            "mean_abs" or "abs_mean".

        Returns
        -------
        float
            Importance.
        """
        if mode == "mean_abs":
            return self.mean_abs_sentiment
        if mode == "abs_mean":
            return self.abs_mean_sentiment
        raise ValueError(f"unknown importance mode {mode!r}")


def indicator_stats(
    units: Iterable[EvaluationUnit], taxonomy: Taxonomy
) -> list[IndicatorStats]:
    """
    Compute one statistics row per taxonomy indicator.

    Parameters
    ----------
    units : Iterable[EvaluationUnit]
        Validated units.
    taxonomy : Taxonomy
        Active taxonomy.

    Returns
    -------
    list[IndicatorStats]
        Rows in indicator order, zero-frequency rows included.

    Raises
    ------
    KeyError
        If a unit names an indicator outside the taxonomy.
    """
    scores: dict[IndicatorId, list[int]] = defaultdict(list)
    for unit in units:
        if not taxonomy.has_indicator(unit.indicator_id):
            raise KeyError(f"unit on unknown indicator {unit.indicator_id}")
        scores[unit.indicator_id].append(int(unit.sentiment))

    rows: list[IndicatorStats] = []
    for ind_id in taxonomy.indicator_ids():
        values = scores.get(ind_id, [])
        if not values:
            rows.append(IndicatorStats(indicator_id=ind_id, frequency=0))
            continue
        n = len(values)
        mean = math.fsum(values) / n
        rows.append(
            IndicatorStats(
                indicator_id=ind_id,
                frequency=n,
                mean_abs_sentiment=math.fsum(abs(v) for v in values) / n,
                abs_mean_sentiment=abs(mean),
                mean_sentiment=mean,
            )
        )
    return rows


def log_frequency(frequency: int, base: float = math.e) -> float:
    """
    Logarithmic frequency log(F + 1).

    Parameters
    ----------
    frequency : int
        Unit count, >= 0.
    base : float
        Logarithm base; natural by default.

    Returns
    -------
    float
        log(F + 1) in the given base.
    """
    if frequency < 0:
        raise ValueError("frequency must be >= 0")
    value = math.log1p(frequency)
    return value if base == math.e else value / math.log(base)


@dataclass(frozen=True, slots=True)
class WeightTable:
    """
    Weight of every taxonomy indicator.
    """

    weights: dict[IndicatorId, float]
    """
    Weight per indicator, in indicator order.
    """

    @classmethod
    def uniform(cls, indicator_ids: Sequence[IndicatorId]) -> WeightTable:
        """
        Equal weights over a set of indicators.

        Parameters
        ----------
        indicator_ids : Sequence[IndicatorId]
            Indicators to cover.

        Returns
        -------
        WeightTable
            Table with weight 1/n everywhere.
        """
        if not indicator_ids:
            raise ValueError("uniform weights need at least one indicator")
        w = 1.0 / len(indicator_ids)
        return cls(weights={i: w for i in sorted(indicator_ids)})

    def weight(self, indicator_id: IndicatorId) -> float:
        """
        Weight of one indicator; 0 when absent.

        Parameters
        ----------
        indicator_id : IndicatorId
            Indicator to look up.

        Returns
        -------
        float
            Weight.
        """
        return self.weights.get(indicator_id, 0.0)

    def total(self) -> float:
        """
        Sum of all weights.

        Returns
        -------
        float
            Exact-rounded sum.
        """
        return math.fsum(self.weights.values())


def indicator_mass(stats: IndicatorStats, config: WeightConfig) -> float:
    """
    Importance times (log) frequency.

    Parameters
    ----------
    stats : IndicatorStats
        Statistics row.
    config : WeightConfig
        Frequency and importance settings.

    Returns
    -------
    float
        Unnormalized mass.
    """
    phi = (
        log_frequency(stats.frequency, config.log_base)
        if config.use_log_frequency
        else float(stats.frequency)
    )
    return stats.importance(config.importance_mode) * phi


def compute_weights(
    stats: Sequence[IndicatorStats], config: WeightConfig | None = None
) -> WeightTable:
    """
    Normalize indicator masses into weights.

    Parameters
    ----------
    stats : Sequence[IndicatorStats]
        One row per indicator.
    config : WeightConfig | None
        Settings; defaults apply when omitted.

    Returns
    -------
    WeightTable
        Weights summing to 1, zero for zero-mass indicators.

    Raises
    ------
    DegenerateMassError
        If the total mass is not above config.epsilon.
    """
    cfg = config or WeightConfig()
    masses = {row.indicator_id: indicator_mass(row, cfg) for row in stats}
    total = math.fsum(masses.values())
    if not total > cfg.epsilon:
        raise DegenerateMassError(
            f"total indicator mass {total!r} is not above epsilon {cfg.epsilon!r}"
        )
    return WeightTable(weights={k: masses[k] / total for k in sorted(masses)})


def weights_or_uniform(
    stats: Sequence[IndicatorStats], config: WeightConfig | None = None
) -> WeightTable:
    """
    Compute weights, falling back to uniform weights on degenerate mass.

    Parameters
    ----------
    stats : Sequence[IndicatorStats]
        One row per indicator.
    config : WeightConfig | None
        Settings.

    Returns
    -------
    WeightTable
        Weight table.
    """
    try:
        return compute_weights(stats, config)
    except DegenerateMassError as exc:
        logger.warning("%s; falling back to uniform weights", exc)
        return WeightTable.uniform([row.indicator_id for row in stats])


def write_weights_csv(
    path: str | Path,
    stats: Sequence[IndicatorStats],
    table: WeightTable,
    config: WeightConfig | None = None,
) -> None:
    """
    Write the weight table as CSV (indicator_id, F, F', I, W).

    F' is always written in the natural base.

    Parameters
    ----------
    path : str | Path
        Destination.
    stats : Sequence[IndicatorStats]
        Statistics rows.
    table : WeightTable
        Weights.
    config : WeightConfig | None
        Importance mode source.

    Returns
    -------
    None
    """
    cfg = config or WeightConfig()
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(WEIGHT_COLUMNS)
        for row in sorted(stats, key=lambda r: r.indicator_id):
            writer.writerow(
                [
                    str(row.indicator_id),
                    row.frequency,
                    repr(log_frequency(row.frequency)),
                    repr(row.importance(cfg.importance_mode)),
                    repr(table.weight(row.indicator_id)),
                ]
            )


def read_weights_csv(path: str | Path) -> WeightTable:
    """
    Read the W column of a weight table CSV.

    Parameters
    ----------
    path : str | Path
        CSV written by write_weights_csv.

    Returns
    -------
    WeightTable
        Weights.

    Raises
    ------
    ValueError
        If the header or a row is malformed.
    """
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != WEIGHT_COLUMNS:
            raise ValueError(f"{path}: unexpected weight table header")
        weights = {
            IndicatorId.parse(row["indicator_id"] or ""): float(row["W"] or "")
            for row in reader
        }
    return WeightTable(weights=dict(sorted(weights.items())))
