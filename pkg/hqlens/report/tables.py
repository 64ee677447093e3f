"""
Indicator table: frequency, importance and weight per indicator.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence

from hqlens.config import WeightConfig
from hqlens.model.taxonomy import Taxonomy
from hqlens.weights import IndicatorStats, WeightTable, log_frequency

INDICATOR_COLUMNS = (
    "id",
    "name",
    "category",
    "F",
    "F'",
    "I",
    "W",
    "mean_sentiment",
)


def indicator_table(
    stats: Sequence[IndicatorStats],
    weights: WeightTable,
    taxonomy: Taxonomy,
    config: WeightConfig | None = None,
) -> str:
    """
    Render the indicator table as CSV.

    Parameters
    ----------
    stats : Sequence[IndicatorStats]
        Statistics rows.
    weights : WeightTable
        Weights over the same indicators.
    taxonomy : Taxonomy
        Names and categories.
    config : WeightConfig | None
        Importance mode.

    Returns
    -------
    str
        CSV with one row per indicator in numeric id order.

    Raises
    ------
    ValueError
        If stats and weights cover different indicators.
    """
    cfg = config or WeightConfig()
    stat_ids = {s.indicator_id for s in stats}
    if stat_ids != weights.weights.keys():
        diff = sorted(str(i) for i in stat_ids ^ weights.weights.keys())
        raise ValueError(f"stats and weights cover different indicators: {diff}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INDICATOR_COLUMNS)
    for row in sorted(stats, key=lambda s: s.indicator_id):
        indicator = taxonomy.indicator(row.indicator_id)
        writer.writerow(
            [
                str(row.indicator_id),
                indicator.name,
                taxonomy.category(indicator.category_id).name,
                row.frequency,
                repr(log_frequency(row.frequency)),
                repr(row.importance(cfg.importance_mode)),
                repr(weights.weight(row.indicator_id)),
                repr(row.mean_sentiment),
            ]
        )
    return buf.getvalue()
