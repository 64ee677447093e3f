"""
Community name normalization and fuzzy matching.
"""

from __future__ import annotations

import unicodedata
from collections.abc import Iterable

from rapidfuzz.distance import Levenshtein

from hqlens.config import MatchPolicy
from hqlens.model.community import Community


def _squash(text: str) -> str:
    """
    NFKC-fold, lowercase and drop whitespace, punctuation and symbols.
    """
    folded = unicodedata.normalize("NFKC", text).casefold()
    return "".join(ch for ch in folded if unicodedata.category(ch)[0] not in "PSZC")


def normalize_name(name: str, policy: MatchPolicy) -> str:
    """
    Normalize a community name for comparison.

    Parameters
    ----------
    name : str
        Raw name.
    policy : MatchPolicy
        Suffix list.

    Returns
    -------
    str
        Name without spacing, punctuation or trailing generic suffixes.
        A suffix is kept when it is all that is left.
    """
    squashed = _squash(name)
    suffixes = sorted(
        {_squash(s) for s in policy.strip_suffixes}, key=len, reverse=True
    )
    stripped = True
    while stripped:
        stripped = False
        for suffix in suffixes:
            if suffix and squashed.endswith(suffix) and len(squashed) > len(suffix):
                squashed = squashed[: -len(suffix)]
                stripped = True
                break
    return squashed


def best_match(
    name: str, candidates: Iterable[tuple[str, str]], policy: MatchPolicy
) -> str | None:
    """
    Key of the candidate whose name best matches.

    Exact normalized matches win; otherwise the smallest normalized edit
    distance within the threshold. Ties go to the smallest key.

    Parameters
    ----------
    name : str
        Name to resolve.
    candidates : Iterable[tuple[str, str]]
        (key, name) pairs.
    policy : MatchPolicy
        Threshold and normalization.

    Returns
    -------
    str | None
        Matched key, or None.
    """
    query = normalize_name(name, policy)
    if not query:
        return None
    best: tuple[float, str] | None = None
    for key, candidate in candidates:
        target = normalize_name(candidate, policy)
        if not target:
            continue
        distance = Levenshtein.normalized_distance(query, target)
        if distance > policy.fuzzy_threshold:
            continue
        if best is None or (distance, key) < best:
            best = (distance, key)
    return None if best is None else best[1]


def match_name(
    name: str, communities: Iterable[Community], policy: MatchPolicy
) -> str | None:
    """
    Match a free-text place name to a community.

    Parameters
    ----------
    name : str
        Name from a post.
    communities : Iterable[Community]
        Candidates.
    policy : MatchPolicy
        Threshold and normalization.

    Returns
    -------
    str | None
        Community id, or None when nothing is within the threshold.
    """
    return best_match(name, ((c.id, c.name) for c in communities), policy)
