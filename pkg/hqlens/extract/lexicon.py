"""
Polarity lexicon for the rule-based backend.

File format: plain UTF-8 text in four sections, one term per line::

    [positive]
    good
    [negative]
    bad
    [negators]
    not
    [intensifiers]
    very 2.0

Blank lines and lines starting with "#" are ignored. Intensifier lines end
with their multiplier. Terms may span several words.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

logger = logging.getLogger(__name__)

_CJK = "\u3400-\u4dbf\u4e00-\u9fff\uf900-\ufaff"
_WORD = rf"(?:(?![{_CJK}])[^\W_])+"
_TOKEN_RE = re.compile(rf"[{_CJK}]|{_WORD}(?:['\u2019]{_WORD})*")

_SECTIONS = ("positive", "negative", "negators", "intensifiers")


def tokenize(text: str) -> list[str]:
    """
    Split text into lowercase tokens.

    CJK ideographs are one token each; other scripts split on non-word
    characters with inner apostrophes kept.

    Parameters
    ----------
    text : str
        Text to split.

    Returns
    -------
    list[str]
        Tokens in order.
    """
    return _TOKEN_RE.findall(text.lower())


def _term_key(term: str) -> tuple[str, ...]:
    """
    Token sequence of a lexicon term.

    Parameters
    ----------
    term : str
        Term as written.

    Returns
    -------
    tuple[str, ...]
        Tokens of the term.
    """
    return tuple(tokenize(term))


@dataclass(frozen=True, slots=True)
class SentimentLexicon:
    """
    Positive and negative terms plus negators and intensifiers.

    Terms are stored as token sequences.
    """

    positive: frozenset[tuple[str, ...]]
    """
    Positive terms.
    """

    negative: frozenset[tuple[str, ...]]
    """
    Negative terms, disjoint from positive.
    """

    intensifiers: dict[tuple[str, ...], float]
    """
    Intensifier terms and their multipliers.
    """

    negators: frozenset[tuple[str, ...]]
    """
    Negation terms.
    """

    def __post_init__(self) -> None:
        """
        Validate disjointness.
        """
        both = self.positive & self.negative
        if both:
            shown = ", ".join(sorted(" ".join(t) for t in both))
            raise ValueError(f"terms both positive and negative: {shown}")

    @classmethod
    def new(
        cls,
        *,
        positive: list[str] | set[str],
        negative: list[str] | set[str],
        intensifiers: dict[str, float] | None = None,
        negators: list[str] | set[str] | None = None,
    ) -> SentimentLexicon:
        """
        Construct a lexicon from plain term strings.

        Parameters
        ----------
        positive : list[str] | set[str]
            Positive terms.
        negative : list[str] | set[str]
            Negative terms.
        intensifiers : dict[str, float] | None
            Intensifier multipliers.
        negators : list[str] | set[str] | None
            Negation terms.

        Returns
        -------
        SentimentLexicon
            Lexicon with tokenized terms.
        """
        def keys(terms: list[str] | set[str] | None) -> frozenset[tuple[str, ...]]:
            return frozenset(k for k in (_term_key(t) for t in terms or ()) if k)

        return cls(
            positive=keys(positive),
            negative=keys(negative),
            intensifiers={
                k: float(v)
                for k, v in ((_term_key(t), m) for t, m in (intensifiers or {}).items())
                if k
            },
            negators=keys(negators),
        )

    @property
    def max_term_tokens(self) -> int:
        """
        Length in tokens of the longest term of any kind.
        """
        lengths = [len(t) for t in self.positive | self.negative | self.negators]
        lengths += [len(t) for t in self.intensifiers]
        return max(lengths, default=1)


def default_lexicon_path() -> Path:
    """
    Path of the shipped lexicon.

    Returns
    -------
    Path
        Location of lexicon.txt inside the package.
    """
    return Path(str(resources.files("hqlens.data").joinpath("lexicon.txt")))


def load_lexicon(path: str | Path) -> SentimentLexicon:
    """
    Load a four-section lexicon file.

    Parameters
    ----------
    path : str | Path
        Lexicon file.

    Returns
    -------
    SentimentLexicon
        Parsed lexicon.

    Raises
    ------
    ValueError
        If a line sits outside a section, a section is unknown, an
        intensifier lacks a numeric multiplier, or a term is both positive
        and negative.
    """
    p = Path(path)
    terms: dict[str, list[str]] = {name: [] for name in _SECTIONS}
    multipliers: dict[str, float] = {}
    section: str | None = None

    for line_no, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in terms:
                raise ValueError(f"{p}:{line_no}: unknown section [{section}]")
            continue
        if section is None:
            raise ValueError(f"{p}:{line_no}: term outside any section")
        if section == "intensifiers":
            term, _, mult = line.rpartition(" ")
            try:
                multipliers[term.strip()] = float(mult)
            except ValueError as exc:
                raise ValueError(
                    f"{p}:{line_no}: intensifier needs a multiplier"
                ) from exc
            if not term.strip():
                raise ValueError(f"{p}:{line_no}: intensifier needs a term")
            continue
        terms[section].append(line)

    lexicon = SentimentLexicon.new(
        positive=terms["positive"],
        negative=terms["negative"],
        intensifiers=multipliers,
        negators=terms["negators"],
    )
    logger.debug(
        "Loaded lexicon %s: %d positive, %d negative, %d negators, %d intensifiers",
        p,
        len(lexicon.positive),
        len(lexicon.negative),
        len(lexicon.negators),
        len(lexicon.intensifiers),
    )
    return lexicon
