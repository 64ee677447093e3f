"""
Share of units per category on each platform.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass

from hqlens.model.platform import Platform
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit


@dataclass(frozen=True, slots=True)
class PlatformDistribution:
    """
    Category shares per platform.

    Platforms without units are absent. Every present platform lists every
    taxonomy category, so its shares sum to 1.
    """

    shares: dict[Platform, dict[int, float]]
    """
    Platform -> category id -> share of the platform's units.
    """

    counts: dict[Platform, dict[int, int]]
    """
    Platform -> category id -> unit count.
    """

    def share(self, platform: Platform, category_id: int) -> float:
        """
        Share of one category on one platform.

        Parameters
        ----------
        platform : Platform
            Platform.
        category_id : int
            Category.

        Returns
        -------
        float
            Share; 0 for absent platforms.
        """
        return self.shares.get(platform, {}).get(category_id, 0.0)

    def to_csv(self, taxonomy: Taxonomy) -> str:
        """
        Render as plot-ready CSV.

        Parameters
        ----------
        taxonomy : Taxonomy
            Category names.

        Returns
        -------
        str
            Rows (platform, category_id, category, units, share).
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["platform", "category_id", "category", "units", "share"])
        for platform, by_cat in self.shares.items():
            for cat_id, share in by_cat.items():
                writer.writerow(
                    [
                        platform.value,
                        cat_id,
                        taxonomy.category(cat_id).name,
                        self.counts[platform][cat_id],
                        repr(share),
                    ]
                )
        return buf.getvalue()


def platform_distribution(
    units: Iterable[tuple[Platform, EvaluationUnit]], taxonomy: Taxonomy
) -> PlatformDistribution:
    """
    Compute category shares per platform.

    Parameters
    ----------
    units : Iterable[tuple[Platform, EvaluationUnit]]
        Units with the platform of their entry.
    taxonomy : Taxonomy
        Category list.

    Returns
    -------
    PlatformDistribution
        Shares, platforms in declaration order.
    """
    per_platform: dict[Platform, Counter[int]] = {}
    for platform, unit in units:
        per_platform.setdefault(platform, Counter())[unit.indicator_id.category] += 1

    shares: dict[Platform, dict[int, float]] = {}
    counts: dict[Platform, dict[int, int]] = {}
    for platform in Platform:
        counter = per_platform.get(platform)
        if not counter:
            continue
        total = sum(counter.values())
        counts[platform] = {c.id: counter[c.id] for c in taxonomy.categories}
        shares[platform] = {c.id: counter[c.id] / total for c in taxonomy.categories}
    return PlatformDistribution(shares=shares, counts=counts)
