"""
Pipeline stages.

Each stage reads its predecessors' artifacts from the output directory and
writes its own.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import httpx

from hqlens.config import BackendConfig, RunConfig
from hqlens.errors import StageError
from hqlens.evaluation import compare_backends, load_gold
from hqlens.extract import (
    ExtractionBackend,
    ExtractionResult,
    LlmBackend,
    PredictionFileBackend,
    RuleBasedBackend,
    default_lexicon_path,
    extract_many,
    load_lexicon,
)
from hqlens.geo import Assignment, CommunityResolver, load_communities, load_pois
from hqlens.ingest import (
    RawRecord,
    Rejected,
    dedup,
    filter_by_date,
    normalize_batch,
    parse_records,
)
from hqlens.model import (
    Community,
    Entry,
    EvaluationUnit,
    Platform,
    Taxonomy,
    default_taxonomy_path,
    load_taxonomy,
)
from hqlens.report import export_geojson, indicator_table, platform_distribution
from hqlens.scoring import (
    city_summary,
    read_scores_csv,
    score_communities,
    write_scores_csv,
)
from hqlens.weights import (
    indicator_stats,
    read_weights_csv,
    weights_or_uniform,
    write_weights_csv,
)

from . import artifacts as art
from .artifacts import ArtifactStore

logger = logging.getLogger(__name__)


class Stage(StrEnum):
    """
    Pipeline stage, in execution order.
    """

    INGEST = "ingest"
    EXTRACT = "extract"
    WEIGHTS = "weights"
    SCORE = "score"
    EVALUATE = "evaluate"
    REPORT = "report"


@dataclass(slots=True)
class StageContext:
    """
    Shared state of one pipeline run.
    """

    config: RunConfig
    """
    Validated run configuration.
    """

    store: ArtifactStore
    """
    Output directory.
    """

    transport: httpx.AsyncBaseTransport | None = None
    """
    HTTP transport override for the llm backend.
    """

    _taxonomy: Taxonomy | None = field(default=None, repr=False)

    @classmethod
    def new(
        cls,
        config: RunConfig,
        *,
        transport: httpx.AsyncBaseTransport | None = None,
    ) -> StageContext:
        """
        Construct a context for a configuration.

        Parameters
        ----------
        config : RunConfig
            Validated configuration.
        transport : httpx.AsyncBaseTransport | None
            HTTP transport override, e.g. a stub in tests.

        Returns
        -------
        StageContext
            Context.
        """
        return cls(
            config=config,
            store=ArtifactStore(Path(config.output_dir)),
            transport=transport,
        )

    @property
    def taxonomy(self) -> Taxonomy:
        """
        Active taxonomy, loaded on first use.
        """
        if self._taxonomy is None:
            self._taxonomy = load_taxonomy(
                self.config.taxonomy or default_taxonomy_path()
            )
        return self._taxonomy

    def communities(self, stage: Stage) -> list[Community]:
        """
        Load the configured community boundaries.

        Parameters
        ----------
        stage : Stage
            Stage asking for them.

        Returns
        -------
        list[Community]
            Communities.

        Raises
        ------
        StageError
            If no communities file is configured.
        """
        if self.config.communities is None:
            raise StageError(stage, "no communities file configured")
        return load_communities(self.config.communities)

    def entries(self, stage: Stage) -> list[Entry]:
        """
        Read the normalized corpus.
        """
        return [Entry.from_wire(r) for r in self.store.read_jsonl(stage, art.ENTRIES)]

    def extractions(self, stage: Stage) -> list[ExtractionResult]:
        """
        Read the extraction results.
        """
        return [
            ExtractionResult.from_wire(r)
            for r in self.store.read_jsonl(stage, art.EXTRACTIONS)
        ]


def build_backend(backend: BackendConfig, ctx: StageContext) -> ExtractionBackend:
    """
    Instantiate a configured backend.

    Parameters
    ----------
    backend : BackendConfig
        Backend selection.
    ctx : StageContext
        Run context.

    Returns
    -------
    ExtractionBackend
        Ready backend; llm backends must be closed with aclose().
    """
    cfg = ctx.config
    if backend.kind == "rule":
        lexicon = load_lexicon(cfg.lexicon or default_lexicon_path())
        return RuleBasedBackend(lexicon=lexicon, name=backend.label or "rule")
    if backend.kind == "predictions":
        if backend.predictions_path is None:
            raise StageError(Stage.EXTRACT, "predictions backend without a path")
        return PredictionFileBackend.load(
            backend.predictions_path, name=backend.label
        )
    return LlmBackend.new(
        backend.llm,
        seed=cfg.seed,
        name=backend.label or backend.llm.mode,
        transport=ctx.transport,
    )


async def _close(backends: list[ExtractionBackend]) -> None:
    for b in backends:
        if isinstance(b, LlmBackend):
            await b.aclose()


def _platform_counts(items: list[Entry]) -> Counter[str]:
    return Counter(e.platform.value for e in items)


async def run_ingest(ctx: StageContext) -> None:
    """
    Parse, clean, deduplicate and date-filter the platform exports.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    cfg = ctx.config
    if not cfg.inputs:
        raise StageError(Stage.INGEST, "no input sources configured")

    records: list[RawRecord] = []
    rejects: list[Rejected] = []
    raw = Counter[str]()
    for source in cfg.inputs:
        parsed = parse_records(source.platform, source.path, label=source.source)
        records.extend(parsed.records)
        rejects.extend(parsed.rejects)
        raw[source.platform.value] += len(parsed.records) + len(parsed.rejects)

    batch = normalize_batch(records, cfg.cleaning)
    rejects.extend(batch.rejects)
    kept, dropped = dedup(batch.entries)
    in_range = kept
    if cfg.date_range is not None:
        in_range = filter_by_date(kept, cfg.date_range.start, cfg.date_range.end)

    rejected = Counter(r.platform.value for r in rejects)
    normalized = _platform_counts(batch.entries)
    deduped = _platform_counts(kept)
    final = _platform_counts(in_range)
    summary: dict[str, Any] = {
        "platforms": {
            p.value: {
                "raw": raw[p.value],
                "rejected": rejected[p.value],
                "normalized": normalized[p.value],
                "duplicates": normalized[p.value] - deduped[p.value],
                "out_of_range": deduped[p.value] - final[p.value],
                "entries": final[p.value],
            }
            for p in Platform
            if raw[p.value]
        },
        "entries": len(in_range),
        "rejected": len(rejects),
        "duplicates": dropped,
    }

    ctx.store.write_jsonl(art.ENTRIES, (e.to_wire() for e in in_range))
    ctx.store.write_jsonl(art.REJECTS, (r.to_wire() for r in rejects))
    ctx.store.write_json(art.INGEST_SUMMARY, summary)
    logger.info(
        "Ingested %d entries (%d rejected, %d duplicates)",
        len(in_range),
        len(rejects),
        dropped,
    )


async def run_extract(ctx: StageContext) -> None:
    """
    Run the selected backend over the corpus.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    entries = ctx.entries(Stage.EXTRACT)
    backend = build_backend(ctx.config.backend, ctx)
    try:
        results = await extract_many(
            backend, entries, ctx.taxonomy, workers=ctx.config.workers
        )
    finally:
        await _close([backend])

    ctx.store.write_jsonl(art.EXTRACTIONS, (r.to_wire() for r in results))
    relevant = sum(r.relevant for r in results)
    units = sum(len(r.units) for r in results)
    logger.info(
        "Extracted %d units from %d relevant of %d entries with %s",
        units,
        relevant,
        len(results),
        backend.info.name,
    )


def _units(results: list[ExtractionResult]) -> list[EvaluationUnit]:
    return [u for r in results for u in r.units]


async def run_weights(ctx: StageContext) -> None:
    """
    Build the indicator weight table.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    units = _units(ctx.extractions(Stage.WEIGHTS))
    stats = indicator_stats(units, ctx.taxonomy)
    table = weights_or_uniform(stats, ctx.config.weights)
    write_weights_csv(ctx.store.path(art.WEIGHTS), stats, table, ctx.config.weights)
    logger.info(
        "Weighted %d indicators from %d units",
        sum(1 for s in stats if s.frequency),
        len(units),
    )


async def run_score(ctx: StageContext) -> None:
    """
    Resolve entries to communities and score every covered community.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    cfg = ctx.config
    entries = ctx.entries(Stage.SCORE)
    results = ctx.extractions(Stage.SCORE)
    weights = read_weights_csv(ctx.store.require(Stage.SCORE, art.WEIGHTS))
    communities = ctx.communities(Stage.SCORE)
    pois = load_pois(cfg.pois) if cfg.pois is not None else []
    resolver = CommunityResolver.new(communities, pois, cfg.matching)

    assignments: list[Assignment] = [resolver.resolve(e) for e in entries]
    community_of = {a.entry_id: a.community_id for a in assignments}
    grouped: dict[str, list[EvaluationUnit]] = defaultdict(list)
    for result in results:
        cid = community_of.get(result.entry_id)
        if cid is not None:
            grouped[cid].extend(result.units)

    scores = score_communities(grouped, weights)
    ctx.store.write_jsonl(
        art.ASSIGNMENTS, (a.to_wire() for a in assignments if a.community_id)
    )
    ctx.store.write_jsonl(
        art.UNASSIGNED, (a.to_wire() for a in assignments if not a.community_id)
    )
    write_scores_csv(ctx.store.path(art.SCORES), scores)

    summary: dict[str, Any]
    if scores:
        summary = city_summary(
            scores,
            ctx.taxonomy,
            weights=weights,
            total_communities=len(communities),
        ).to_wire()
    else:
        logger.warning("No community received any unit")
        summary = {
            "mean_total": None,
            "deciles": [],
            "category_ranking": [],
            "covered_communities": 0,
            "total_communities": len(communities),
        }
    ctx.store.write_json(art.CITY_SUMMARY, summary)
    assigned = sum(1 for a in assignments if a.community_id)
    logger.info(
        "Assigned %d of %d entries; scored %d of %d communities",
        assigned,
        len(assignments),
        len(scores),
        len(communities),
    )


async def run_evaluate(ctx: StageContext) -> None:
    """
    Compare the selected backend and baselines against the gold file.

    Skipped when no gold file is configured.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    cfg = ctx.config
    if cfg.gold is None:
        logger.info("No gold file configured; skipping evaluation")
        return
    gold = load_gold(cfg.gold, ctx.taxonomy)
    selections = [cfg.backend, *cfg.baselines]
    backends = [build_backend(b, ctx) for b in selections]
    try:
        table = await compare_backends(
            gold, backends, ctx.taxonomy, workers=cfg.workers
        )
    finally:
        await _close(backends)

    ctx.store.write_text(art.EVALUATION_CSV, table.to_csv())
    ctx.store.write_text(art.EVALUATION_TXT, table.render_text())
    ctx.store.write_json(art.EVALUATION_JSON, table.to_wire())
    logger.info("Evaluated %d backends on %d gold entries", len(backends), len(gold))


async def run_report(ctx: StageContext) -> None:
    """
    Emit the indicator table, platform distribution and score map.

    Parameters
    ----------
    ctx : StageContext
        Run context.

    Returns
    -------
    None
    """
    taxonomy = ctx.taxonomy
    entries = ctx.entries(Stage.REPORT)
    results = ctx.extractions(Stage.REPORT)
    weights = read_weights_csv(ctx.store.require(Stage.REPORT, art.WEIGHTS))
    scores = read_scores_csv(ctx.store.require(Stage.REPORT, art.SCORES))
    communities = ctx.communities(Stage.REPORT)

    units = _units(results)
    stats = indicator_stats(units, taxonomy)
    ctx.store.write_text(
        art.INDICATOR_TABLE,
        indicator_table(stats, weights, taxonomy, ctx.config.weights),
    )

    platform_of = {e.id: e.platform for e in entries}
    distribution = platform_distribution(
        ((platform_of[u.entry_id], u) for u in units if u.entry_id in platform_of),
        taxonomy,
    )
    ctx.store.write_text(art.PLATFORM_DISTRIBUTION, distribution.to_csv(taxonomy))
    ctx.store.write_json(art.COMMUNITIES_GEOJSON, export_geojson(communities, scores))
    logger.info("Wrote report for %d communities", len(communities))


STAGES = {
    Stage.INGEST: run_ingest,
    Stage.EXTRACT: run_extract,
    Stage.WEIGHTS: run_weights,
    Stage.SCORE: run_score,
    Stage.EVALUATE: run_evaluate,
    Stage.REPORT: run_report,
}
