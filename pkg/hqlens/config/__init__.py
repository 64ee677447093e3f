"""
Run configuration types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from typing import Literal

from hqlens.model.platform import Platform


@dataclass(frozen=True, slots=True)
class CleaningConfig:
    """
    Text cleaning rules applied during ingestion.
    """

    strip_urls: bool = True
    """
    Remove http(s) and www links.
    """

    collapse_whitespace: bool = True
    """
    Replace whitespace runs with one space.
    """

    strip_emoji: bool = False
    """
    Remove emoji and pictographic symbols.
    """

    min_length: int = 5
    """
    Shortest accepted cleaned text, characters.
    """

    max_length: int = 5000
    """
    Longest accepted cleaned text, characters.
    """

    def __post_init__(self) -> None:
        """
        Validate length bounds.
        """
        if not 0 < self.min_length <= self.max_length:
            raise ValueError("cleaning bounds need 0 < min_length <= max_length")


@dataclass(frozen=True, slots=True)
class WeightConfig:
    """
    Indicator weighting options.
    """

    use_log_frequency: bool = True
    """
    Weight by log(F + 1) instead of raw frequency F.
    """

    importance_mode: Literal["mean_abs", "abs_mean"] = "mean_abs"
    """
    Aggregate importance as mean of |s| or as |mean of s|.
    """

    epsilon: float = 1e-12
    """
    Total mass at or below which normalization is degenerate.
    """

    log_base: float = math.e
    """
    Base of the log frequency transform; cancels out of the weights.
    """

    def __post_init__(self) -> None:
        """
        Validate numeric options.
        """
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.log_base <= 1:
            raise ValueError("log_base must be > 1")


@dataclass(frozen=True, slots=True)
class MatchPolicy:
    """
    Community name matching policy.
    """

    fuzzy_threshold: float = 0.2
    """
    Largest accepted normalized edit distance, in [0, 1].
    """

    strip_suffixes: tuple[str, ...] = (
        "residential community",
        "residential district",
        "community",
        "compound",
        "estate",
        "apartments",
        "garden",
        "小区",
        "社区",
        "家园",
        "花园",
        "公寓",
    )
    """
    Generic suffixes removed from names before comparison.
    """

    def __post_init__(self) -> None:
        """
        Validate the threshold.
        """
        if not 0.0 <= self.fuzzy_threshold <= 1.0:
            raise ValueError("fuzzy_threshold must lie in [0, 1]")


@dataclass(frozen=True, slots=True)
class LlmClientConfig:
    """
    Remote chat-completion model settings.
    """

    base_url: str = "https://api.openai.com/v1"
    """
    Endpoint root; requests go to <base_url>/chat/completions.
    """

    model: str = "gpt-4o"
    """
    Model name; a fine-tuned model name selects fine-tuned mode.
    """

    mode: Literal["zero_shot", "few_shot", "fine_tuned"] = "zero_shot"
    """
    Usage mode reported in the backend descriptor.
    """

    api_key_env: str = "OPENAI_API_KEY"
    """
    Environment variable holding the API key.
    """

    max_in_flight: int = 4
    """
    Ceiling on concurrent requests.
    """

    timeout_s: float = 60.0
    """
    Per-request timeout, seconds.
    """

    retries: int = 3
    """
    Retries after the first attempt on transport errors, 429 and 5xx.
    """

    backoff_base_s: float = 0.5
    """
    First retry delay; doubles on every retry.
    """

    temperature: float = 0.0
    """
    Sampling temperature; 0 makes replies repeatable.
    """

    task_mode: Literal["combined", "per_task"] = "combined"
    """
    One combined prompt, or relevance / extraction / sentiment as three calls.
    """

    exemplars_path: str | None = None
    """
    Gold file the few-shot exemplars are drawn from.
    """

    exemplar_count: int = 10
    """
    Number of few-shot exemplars.
    """

    strict: bool = True
    """
    Reject whole replies with an invalid unit instead of dropping the unit.
    """

    def __post_init__(self) -> None:
        """
        Validate numeric options.
        """
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.exemplar_count < 0:
            raise ValueError("exemplar_count must be >= 0")


@dataclass(frozen=True, slots=True)
class BackendConfig:
    """
    Extraction backend selection.
    """

    kind: Literal["rule", "llm", "predictions"] = "rule"
    """
    Backend kind.
    """

    label: str | None = None
    """
    Column label in comparison tables; defaults to the backend name.
    """

    predictions_path: str | None = None
    """
    JSON-lines prediction file for the predictions backend.
    """

    llm: LlmClientConfig = field(default_factory=LlmClientConfig)
    """
    Model settings for the llm backend.
    """

    @classmethod
    def parse(cls, selector: str) -> BackendConfig:
        """
        Parse a command-line backend selector.

        Parameters
        ----------
        selector : str
            "rule", "llm" or "predictions:<path>".

        Returns
        -------
        BackendConfig
            Selected backend.
        """
        if selector == "rule":
            return cls(kind="rule")
        if selector == "llm":
            return cls(kind="llm")
        if selector.startswith("predictions:") and len(selector) > len("predictions:"):
            return cls(kind="predictions", predictions_path=selector.split(":", 1)[1])
        raise ValueError(f"unknown backend selector {selector!r}")


@dataclass(frozen=True, slots=True)
class InputSource:
    """
    One platform export.
    """

    platform: Platform
    """
    Platform kind, selects the column adapter.
    """

    path: str
    """
    CSV or JSON-lines export.
    """

    source: str | None = None
    """
    Free-form site label; defaults to the platform kind.
    """


@dataclass(frozen=True, slots=True)
class DateRange:
    """
    Inclusive posting-date window.
    """

    start: date
    """
    First kept date (UTC).
    """

    end: date
    """
    Last kept date (UTC).
    """

    def __post_init__(self) -> None:
        """
        Validate ordering.
        """
        if self.start > self.end:
            raise ValueError("date range start must not be after end")


@dataclass(frozen=True, slots=True)
class RunConfig:
    """
    Configuration of one pipeline run.
    """

    inputs: tuple[InputSource, ...] = ()
    """
    Platform exports to ingest.
    """

    taxonomy: str | None = None
    """
    Taxonomy file; None selects the shipped default.
    """

    lexicon: str | None = None
    """
    Sentiment lexicon file; None selects the shipped default.
    """

    communities: str | None = None
    """
    AOI GeoJSON with community polygons.
    """

    pois: str | None = None
    """
    POI CSV backing name-based resolution.
    """

    gold: str | None = None
    """
    Gold annotation file for the evaluate stage.
    """

    backend: BackendConfig = field(default_factory=BackendConfig)
    """
    Backend used by the extract stage.
    """

    baselines: tuple[BackendConfig, ...] = ()
    """
    Extra backends compared against the run backend in the evaluate stage.
    """

    weights: WeightConfig = field(default_factory=WeightConfig)
    """
    Weighting options.
    """

    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    """
    Cleaning options.
    """

    matching: MatchPolicy = field(default_factory=MatchPolicy)
    """
    Community name matching policy.
    """

    date_range: DateRange | None = None
    """
    Posting-date window; None keeps everything.
    """

    output_dir: str = "out"
    """
    Directory receiving all artifacts.
    """

    seed: int = 0
    """
    Seed for sampling utilities.
    """

    workers: int = 4
    """
    Concurrent extraction workers.
    """

    def __post_init__(self) -> None:
        """
        Validate numeric options.
        """
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
