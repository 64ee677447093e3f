"""
Decoding and validation of chat-model replies.
"""

from __future__ import annotations

import json
import logging
import re
from typing import Annotated, Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictBool,
    StrictInt,
    StrictStr,
    StringConstraints,
    ValidationError,
)

from hqlens.errors import MalformedResponseError
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit, IndicatorId

from .backend import ExtractionResult

logger = logging.getLogger(__name__)

_FENCE_RE = re.compile(r"```(?:json)?", re.IGNORECASE)
_TRAILING_COMMA_RE = re.compile(r",\s*([}\]])")

Sentiment = Annotated[StrictInt, Field(ge=-2, le=2)]
Text = Annotated[StrictStr, StringConstraints(strip_whitespace=True, min_length=1)]


class _UnitReply(BaseModel):
    model_config = ConfigDict(extra="ignore")

    object: Text
    content: Text
    indicator: StrictStr
    sentiment: Sentiment


class _UnitNoSentiment(BaseModel):
    model_config = ConfigDict(extra="ignore")

    object: Text
    content: Text
    indicator: StrictStr


class _CombinedReply(BaseModel):
    model_config = ConfigDict(extra="ignore")

    relevant: StrictBool
    units: list[Any] = []


class _RelevanceReply(BaseModel):
    model_config = ConfigDict(extra="ignore")

    relevant: StrictBool


class _ExtractionReply(BaseModel):
    model_config = ConfigDict(extra="ignore")

    units: list[Any]


class _SentimentReply(BaseModel):
    model_config = ConfigDict(extra="ignore")

    sentiments: list[Sentiment]


def _fragment(value: Any) -> str:
    """
    Short quotable rendering of an offending value.
    """
    text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
    return text if len(text) <= 200 else text[:197] + "..."


def _balanced_objects(text: str) -> list[str]:
    """
    Top-level brace-balanced substrings, in order of appearance.

    Braces inside JSON string literals are ignored.

    Parameters
    ----------
    text : str
        Arbitrary text.

    Returns
    -------
    list[str]
        Candidate object texts.
    """
    found: list[str] = []
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for k, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = k
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                found.append(text[start : k + 1])
    return found


def _repair(text: str) -> str:
    """
    Remove markdown fences and trailing commas.
    """
    return _TRAILING_COMMA_RE.sub(r"\1", _FENCE_RE.sub("", text))


def extract_json_object(text: str) -> dict[str, Any] | None:
    """
    Find the first JSON object embedded in free text.

    The whole text is tried first, then every balanced brace span; each
    attempt is retried once after repair (fences, trailing commas).

    Parameters
    ----------
    text : str
        Model reply, possibly wrapped in prose.

    Returns
    -------
    dict[str, Any] | None
        First decodable object, or None.
    """
    candidates = [text.strip(), *_balanced_objects(text)]
    for candidate in candidates:
        for attempt in (candidate, _repair(candidate).strip()):
            try:
                obj = json.loads(attempt)
            except json.JSONDecodeError:
                continue
            if isinstance(obj, dict):
                return obj
    return None


def _decode(text: str) -> dict[str, Any]:
    """
    Decode a reply into a JSON object or fail.
    """
    obj = extract_json_object(text)
    if obj is None:
        raise MalformedResponseError(
            "reply contains no JSON object", [f"reply: {_fragment(text)}"]
        )
    return obj


def _validated(model: type[BaseModel], obj: Any) -> Any:
    """
    Validate against a reply model, mapping failures to MalformedResponseError.
    """
    try:
        return model.model_validate(obj)
    except ValidationError as exc:
        notes = [
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']} "
            f"(got {_fragment(err.get('input'))})"
            for err in exc.errors()
        ]
        raise MalformedResponseError("reply does not match the schema", notes) from exc


def _units(
    raw_units: list[Any],
    model: type[_UnitReply] | type[_UnitNoSentiment],
    taxonomy: Taxonomy,
    entry_id: str,
    strict: bool,
    notes: list[str],
) -> list[EvaluationUnit]:
    """
    Validate unit objects one by one.

    In strict mode the first bad unit fails the reply; otherwise it is
    dropped and noted.
    """
    units: list[EvaluationUnit] = []
    for raw in raw_units:
        try:
            parsed = _validated(model, raw)
            indicator_id = IndicatorId.parse(parsed.indicator)
            if not taxonomy.has_indicator(indicator_id):
                raise MalformedResponseError(
                    "reply names an unknown indicator",
                    [f"unknown indicator in {_fragment(raw)}"],
                )
        except ValueError as exc:
            bad = MalformedResponseError(
                "reply has a bad indicator id", [f"{exc} in {_fragment(raw)}"]
            )
            if strict:
                raise bad from exc
            notes.extend(bad.diagnostics)
            continue
        except MalformedResponseError as exc:
            if strict:
                raise
            notes.extend(exc.diagnostics)
            continue
        units.append(
            EvaluationUnit(
                entry_id=entry_id,
                object_text=parsed.object,
                content_text=parsed.content,
                indicator_id=indicator_id,
                sentiment=getattr(parsed, "sentiment", 0),
            )
        )
    return units


def parse_llm_response(
    text: str,
    taxonomy: Taxonomy,
    *,
    entry_id: str = "",
    strict: bool = True,
) -> ExtractionResult:
    """
    Turn a combined-task reply into an extraction result.

    Parameters
    ----------
    text : str
        Reply; may wrap the JSON object in prose or a code fence.
    taxonomy : Taxonomy
        Active taxonomy.
    entry_id : str
        Entry the reply belongs to.
    strict : bool
        Fail the whole reply on a bad unit instead of dropping the unit.

    Returns
    -------
    ExtractionResult
        Parsed result; dropped units are listed in diagnostics.

    Raises
    ------
    MalformedResponseError
        If no object can be decoded or validation fails in strict mode.
    """
    reply = _validated(_CombinedReply, _decode(text))
    notes: list[str] = []
    units = _units(reply.units, _UnitReply, taxonomy, entry_id, strict, notes)
    if notes:
        logger.debug("Dropped %d units from reply for %s", len(notes), entry_id)
    return ExtractionResult(
        entry_id=entry_id,
        relevant=reply.relevant,
        units=tuple(units) if reply.relevant else (),
        diagnostics=tuple(notes),
    )


def parse_relevance(text: str) -> bool:
    """
    Parse a relevance-task reply.

    Parameters
    ----------
    text : str
        Reply text.

    Returns
    -------
    bool
        Relevance flag.
    """
    reply = _validated(_RelevanceReply, _decode(text))
    return bool(reply.relevant)


def parse_extraction(
    text: str,
    taxonomy: Taxonomy,
    *,
    entry_id: str = "",
    strict: bool = True,
) -> tuple[list[EvaluationUnit], list[str]]:
    """
    Parse an extraction-task reply.

    Units come back with a neutral placeholder sentiment, filled in by the
    sentiment task.

    Parameters
    ----------
    text : str
        Reply text.
    taxonomy : Taxonomy
        Active taxonomy.
    entry_id : str
        Entry the reply belongs to.
    strict : bool
        Fail on a bad unit instead of dropping it.

    Returns
    -------
    tuple[list[EvaluationUnit], list[str]]
        Units and notes about dropped units.
    """
    reply = _validated(_ExtractionReply, _decode(text))
    notes: list[str] = []
    units = _units(reply.units, _UnitNoSentiment, taxonomy, entry_id, strict, notes)
    return units, notes


def parse_sentiments(text: str, expected: int) -> list[int]:
    """
    Parse a sentiment-task reply.

    Parameters
    ----------
    text : str
        Reply text.
    expected : int
        Number of units that were listed.

    Returns
    -------
    list[int]
        One score per unit, in unit order.

    Raises
    ------
    MalformedResponseError
        If scores are out of range or their count differs.
    """
    reply = _validated(_SentimentReply, _decode(text))
    if len(reply.sentiments) != expected:
        raise MalformedResponseError(
            "sentiment count does not match unit count",
            [f"expected {expected}, got {_fragment(reply.sentiments)}"],
        )
    return [int(s) for s in reply.sentiments]
