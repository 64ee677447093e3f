"""
Keyword and lexicon based extraction baseline.
"""

from __future__ import annotations

import asyncio
import logging
import math
import re
from dataclasses import dataclass

from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Indicator, Taxonomy
from hqlens.model.unit import EvaluationUnit

from .backend import BackendInfo, BackendMode, ExtractionResult
from .lexicon import SentimentLexicon, tokenize

logger = logging.getLogger(__name__)

_SENTENCE_RE = re.compile(
    r"[^。！？!?；;\n]+?(?:[。！？!?；;]+|\.+(?=\s|$)|(?=\n)|$)", re.DOTALL
)

NEGATION_WINDOW = 2
"""
Number of tokens before a polarity term searched for a negator.
"""


@dataclass(frozen=True, slots=True)
class ScoreThresholds:
    """
    Mapping from a rounded raw lexicon score to the five-point scale.

    The defaults give r <= -2 -> -2, r = -1 -> -1, r = 0 -> 0, r = 1 -> 1,
    r >= 2 -> 2.
    """

    weak_at: int = 1
    """
    Smallest magnitude scored as +/-1.
    """

    strong_at: int = 2
    """
    Smallest magnitude scored as +/-2.
    """

    def __post_init__(self) -> None:
        """
        Validate ordering.
        """
        if not 0 < self.weak_at <= self.strong_at:
            raise ValueError("thresholds need 0 < weak_at <= strong_at")

    def score(self, raw: float) -> int:
        """
        Map a raw score to the five-point scale.

        Non-integer raw scores are rounded half away from zero first.

        Parameters
        ----------
        raw : float
            Sum of signed, scaled term contributions.

        Returns
        -------
        int
            Score in -2..2.
        """
        magnitude = math.floor(abs(raw) + 0.5)
        sign = -1 if raw < 0 else 1
        if magnitude >= self.strong_at:
            return 2 * sign
        if magnitude >= self.weak_at:
            return sign
        return 0


@dataclass(frozen=True, slots=True)
class _Span:
    """
    Lexicon term occurrence in a token list.
    """

    kind: str
    """
    "positive", "negative", "negator" or "intensifier".
    """

    start: int
    """
    Index of the first token.
    """

    end: int
    """
    Index one past the last token.
    """

    weight: float = 1.0
    """
    Intensifier multiplier.
    """


def split_sentences(text: str) -> list[str]:
    """
    Split text at terminal punctuation and line breaks.

    Parameters
    ----------
    text : str
        Post text.

    Returns
    -------
    list[str]
        Non-empty sentences with their terminal punctuation kept.
    """
    out: list[str] = []
    for m in _SENTENCE_RE.finditer(text):
        sentence = m.group(0).strip()
        if sentence and tokenize(sentence):
            out.append(sentence)
    return out


def _scan(tokens: list[str], lexicon: SentimentLexicon) -> list[_Span]:
    """
    Find lexicon terms, longest match first, left to right.

    Parameters
    ----------
    tokens : list[str]
        Sentence tokens.
    lexicon : SentimentLexicon
        Lexicon to match.

    Returns
    -------
    list[_Span]
        Non-overlapping term occurrences.
    """
    spans: list[_Span] = []
    longest = lexicon.max_term_tokens
    i = 0
    while i < len(tokens):
        matched: _Span | None = None
        for length in range(min(longest, len(tokens) - i), 0, -1):
            key = tuple(tokens[i : i + length])
            if key in lexicon.negators:
                matched = _Span("negator", i, i + length)
            elif key in lexicon.intensifiers:
                matched = _Span("intensifier", i, i + length, lexicon.intensifiers[key])
            elif key in lexicon.positive:
                matched = _Span("positive", i, i + length)
            elif key in lexicon.negative:
                matched = _Span("negative", i, i + length)
            if matched is not None:
                break
        if matched is None:
            i += 1
            continue
        spans.append(matched)
        i = matched.end
    return spans


def raw_sentiment(sentence: str, lexicon: SentimentLexicon) -> float:
    """
    Raw lexicon score of a sentence.

    Each polarity term contributes +1 or -1, flipped when a negator ends
    within the two preceding tokens and multiplied by an intensifier that
    ends right before it.

    Parameters
    ----------
    sentence : str
        Sentence text.
    lexicon : SentimentLexicon
        Lexicon to apply.

    Returns
    -------
    float
        Raw score.
    """
    spans = _scan(tokenize(sentence), lexicon)
    negator_ends = [s.end for s in spans if s.kind == "negator"]
    boost = {s.end: s.weight for s in spans if s.kind == "intensifier"}

    raw = 0.0
    for span in spans:
        if span.kind not in ("positive", "negative"):
            continue
        value = 1.0 if span.kind == "positive" else -1.0
        window = range(span.start - NEGATION_WINDOW + 1, span.start + 1)
        if any(end in window for end in negator_ends):
            value = -value
        raw += value * boost.get(span.start, 1.0)
    return raw


def _first_keyword(sentence: str, indicator: Indicator) -> str | None:
    """
    Keyword of an indicator occurring earliest in a sentence.

    Parameters
    ----------
    sentence : str
        Sentence text.
    indicator : Indicator
        Indicator whose keywords are searched.

    Returns
    -------
    str | None
        Matched keyword (longest on position ties), or None.
    """
    lowered = sentence.lower()
    best: tuple[int, int, str] | None = None
    for keyword in indicator.keywords:
        pos = lowered.find(keyword.lower())
        if pos < 0:
            continue
        candidate = (pos, -len(keyword), keyword)
        if best is None or candidate < best:
            best = candidate
    return None if best is None else best[2]


def rule_based_extract(
    entry: Entry,
    taxonomy: Taxonomy,
    lexicon: SentimentLexicon,
    thresholds: ScoreThresholds | None = None,
) -> ExtractionResult:
    """
    Extract units by keyword substring search and lexicon scoring.

    A sentence yields one unit per indicator with a matching keyword; the
    unit's object is the keyword, its content the sentence, its sentiment
    the thresholded sentence score. An entry is relevant iff any keyword
    matched.

    Parameters
    ----------
    entry : Entry
        Post to analyze.
    taxonomy : Taxonomy
        Indicators and keywords.
    lexicon : SentimentLexicon
        Polarity lexicon.
    thresholds : ScoreThresholds | None
        Score mapping; defaults to the symmetric integer table.

    Returns
    -------
    ExtractionResult
        Deterministic result.
    """
    table = thresholds or ScoreThresholds()
    units: list[EvaluationUnit] = []
    for sentence in split_sentences(entry.text):
        sentiment: int | None = None
        for indicator in taxonomy.indicators:
            keyword = _first_keyword(sentence, indicator)
            if keyword is None:
                continue
            if sentiment is None:
                sentiment = table.score(raw_sentiment(sentence, lexicon))
            units.append(
                EvaluationUnit(
                    entry_id=entry.id,
                    object_text=keyword,
                    content_text=sentence,
                    indicator_id=indicator.id,
                    sentiment=sentiment,
                )
            )
    return ExtractionResult(entry_id=entry.id, relevant=bool(units), units=tuple(units))


@dataclass(frozen=True, slots=True)
class RuleBasedBackend:
    """
    Backend wrapping rule_based_extract.
    """

    lexicon: SentimentLexicon
    """
    Polarity lexicon.
    """

    thresholds: ScoreThresholds = ScoreThresholds()
    """
    Raw score mapping.
    """

    name: str = "rule"
    """
    Backend name.
    """

    @property
    def info(self) -> BackendInfo:
        """
        Capability descriptor.
        """
        return BackendInfo(name=self.name, mode=BackendMode.RULE_BASED)

    async def extract(self, entry: Entry, taxonomy: Taxonomy) -> ExtractionResult:
        """
        Run the rule-based extractor off the event loop.

        Parameters
        ----------
        entry : Entry
            Post to analyze.
        taxonomy : Taxonomy
            Active taxonomy.

        Returns
        -------
        ExtractionResult
            Result for the entry.
        """
        return await asyncio.to_thread(
            rule_based_extract, entry, taxonomy, self.lexicon, self.thresholds
        )
