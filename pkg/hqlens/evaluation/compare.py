"""
Side-by-side comparison of extraction backends on a gold corpus.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from rich.console import Console
from rich.table import Table

from hqlens.extract.backend import ExtractionBackend, extract_many
from hqlens.model.taxonomy import Taxonomy

from .gold import GoldAnnotation
from .metrics import METRIC_NAMES, MetricsReport, compute_metrics

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class BackendColumn:
    """
    Metrics of one backend, or the reason they are missing.
    """

    name: str
    """
    Column label.
    """

    report: MetricsReport | None
    """
    Metrics; None when the backend did not cover the corpus.
    """

    missing: tuple[str, ...] = ()
    """
    Entry ids the backend had no prediction for.
    """

    @property
    def complete(self) -> bool:
        """
        Whether the backend covered every gold entry.
        """
        return self.report is not None


def _cell(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}"


@dataclass(frozen=True, slots=True)
class ComparisonTable:
    """
    One metrics column per backend, in the order given.
    """

    columns: tuple[BackendColumn, ...]

    def to_csv(self) -> str:
        """
        Render as CSV: one row per metric, one column per backend.

        Returns
        -------
        str
            CSV document; incomplete columns read "incomplete".
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", *(c.name for c in self.columns)])
        writer.writerow(["complete", *(str(c.complete).lower() for c in self.columns)])
        for name in ("entries", "gold_units", "predicted_units", *METRIC_NAMES):
            row = [name]
            for c in self.columns:
                if c.report is None:
                    row.append("incomplete")
                    continue
                value = getattr(c.report, name)
                row.append("" if value is None else repr(value))
            writer.writerow(row)
        return buf.getvalue()

    def render_text(self, *, width: int = 100) -> str:
        """
        Render as an aligned plain-text table.

        Parameters
        ----------
        width : int
            Console width.

        Returns
        -------
        str
            Table text.
        """
        table = Table(title="Extraction accuracy")
        table.add_column("Metric")
        for c in self.columns:
            table.add_column(c.name, justify="right")
        for name in METRIC_NAMES:
            table.add_row(
                name,
                *(
                    "incomplete" if c.report is None else _cell(c.report.metric(name))
                    for c in self.columns
                ),
            )
        buf = io.StringIO()
        console = Console(
            file=buf, width=width, color_system=None, force_terminal=False
        )
        console.print(table)
        return buf.getvalue()

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            {"backends": [...]}, in column order.
        """
        return {
            "backends": [
                {
                    "name": c.name,
                    "complete": c.complete,
                    "missing": list(c.missing),
                    "metrics": None if c.report is None else c.report.to_wire(),
                }
                for c in self.columns
            ]
        }


async def compare_backends(
    gold: Sequence[GoldAnnotation],
    backends: Sequence[ExtractionBackend],
    taxonomy: Taxonomy,
    *,
    labels: Sequence[str] | None = None,
    workers: int = 4,
) -> ComparisonTable:
    """
    Run every backend on the gold entries and score it.

    Parameters
    ----------
    gold : Sequence[GoldAnnotation]
        Annotated corpus.
    backends : Sequence[ExtractionBackend]
        Backends to compare.
    taxonomy : Taxonomy
        Active taxonomy.
    labels : Sequence[str] | None
        Column labels; backend names by default.
    workers : int
        Concurrent extract calls per backend.

    Returns
    -------
    ComparisonTable
        One column per backend. A backend missing predictions yields an
        incomplete column without affecting the others.
    """
    names = list(labels) if labels is not None else [b.info.name for b in backends]
    if len(names) != len(backends):
        raise ValueError("one label per backend is required")
    gold_by_id = {g.entry.id: g for g in gold}
    entries = [gold_by_id[k].entry for k in sorted(gold_by_id)]

    columns: list[BackendColumn] = []
    for name, backend in zip(names, backends, strict=True):
        missing: list[str] = []
        results = await extract_many(
            backend, entries, taxonomy, workers=workers, missing=missing
        )
        if missing:
            logger.warning(
                "Backend %s lacks predictions for %d entries", name, len(missing)
            )
            columns.append(BackendColumn(name, None, tuple(missing)))
            continue
        report = compute_metrics([(r, gold_by_id[r.entry_id]) for r in results])
        columns.append(BackendColumn(name, report))
    return ComparisonTable(columns=tuple(columns))
