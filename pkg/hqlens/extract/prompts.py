"""
Prompt construction for the chat-completion backend.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from hqlens.model.entry import Entry
from hqlens.model.taxonomy import Taxonomy
from hqlens.model.unit import EvaluationUnit

from .backend import ExtractionResult

SYSTEM_PROMPT = (
    "You annotate resident posts about neighbourhood housing quality. "
    "Reply with exactly one JSON object and nothing else."
)

SCALE = (
    "Sentiment scale: -2 strongly negative, -1 negative, 0 neutral, "
    "1 positive, 2 strongly positive."
)


class PromptTask(StrEnum):
    """
    Annotation task a prompt asks for.
    """

    RELEVANCE = "relevance"
    EXTRACTION = "extraction"
    SENTIMENT = "sentiment"
    COMBINED = "combined"


_INSTRUCTIONS: dict[PromptTask, str] = {
    PromptTask.RELEVANCE: (
        "Decide whether the post discusses the housing quality of a residential "
        "community, i.e. any of the indicators listed below."
    ),
    PromptTask.EXTRACTION: (
        "Extract every evaluation unit from the post: the evaluated object, a short "
        "content descriptor, and the id of the indicator the content belongs to."
    ),
    PromptTask.SENTIMENT: (
        "Score the sentiment the post expresses towards each listed evaluation unit."
    ),
    PromptTask.COMBINED: (
        "Decide whether the post discusses the housing quality of a residential "
        "community. If it does, extract every evaluation unit: the evaluated object, "
        "a short content descriptor, the id of the indicator the content belongs to, "
        "and the sentiment towards it."
    ),
}

_SCHEMAS: dict[PromptTask, str] = {
    PromptTask.RELEVANCE: '{"relevant": true or false}',
    PromptTask.EXTRACTION: (
        '{"units": [{"object": "<text>", "content": "<text>", '
        '"indicator": "<indicator id>"}]}'
    ),
    PromptTask.SENTIMENT: (
        '{"sentiments": [<integer from -2 to 2, one per unit, in unit order>]}'
    ),
    PromptTask.COMBINED: (
        '{"relevant": true or false, "units": [{"object": "<text>", '
        '"content": "<text>", "indicator": "<indicator id>", '
        '"sentiment": <integer from -2 to 2>}]}'
    ),
}


@dataclass(frozen=True, slots=True)
class Exemplar:
    """
    Annotated post shown to the model in few-shot mode.
    """

    text: str
    """
    Post text.
    """

    result: ExtractionResult
    """
    Gold annotation of the post.
    """


def _dumps(obj: Any) -> str:
    """
    Render JSON on one line, keeping non-ASCII text readable.

    Parameters
    ----------
    obj : Any
        Value to render.

    Returns
    -------
    str
        Compact JSON.
    """
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def _unit_lines(units: Sequence[EvaluationUnit]) -> list[str]:
    """
    Numbered listing of units for the sentiment task.

    Parameters
    ----------
    units : Sequence[EvaluationUnit]
        Units to list.

    Returns
    -------
    list[str]
        One line per unit.
    """
    return [
        f"  unit {k}: object={_dumps(u.object_text)} content={_dumps(u.content_text)} "
        f"indicator={u.indicator_id}"
        for k, u in enumerate(units, start=1)
    ]


def answer_for(task: PromptTask, result: ExtractionResult) -> dict[str, Any]:
    """
    Expected reply object of a task for a known result.

    Parameters
    ----------
    task : PromptTask
        Task.
    result : ExtractionResult
        Known annotation.

    Returns
    -------
    dict[str, Any]
        Reply in the task's response schema.
    """
    if task is PromptTask.RELEVANCE:
        return {"relevant": result.relevant}
    if task is PromptTask.EXTRACTION:
        return {
            "units": [
                {k: v for k, v in u.to_wire().items() if k != "sentiment"}
                for u in result.units
            ]
        }
    if task is PromptTask.SENTIMENT:
        return {"sentiments": [int(u.sentiment) for u in result.units]}
    return {"relevant": result.relevant, "units": [u.to_wire() for u in result.units]}


def build_prompt(
    task: PromptTask,
    entry: Entry,
    taxonomy: Taxonomy,
    exemplars: Sequence[Exemplar] = (),
    *,
    units: Sequence[EvaluationUnit] = (),
) -> str:
    """
    Build the user prompt for one task.

    The prompt lists every taxonomy indicator once, states the response
    schema, appends one input/answer block per exemplar and ends with the
    post. Output depends only on the arguments.

    Parameters
    ----------
    task : PromptTask
        Task to ask for.
    entry : Entry
        Post to annotate.
    taxonomy : Taxonomy
        Indicator list embedded in the prompt.
    exemplars : Sequence[Exemplar]
        Few-shot examples; empty for zero-shot.
    units : Sequence[EvaluationUnit]
        Units to score, for the sentiment task.

    Returns
    -------
    str
        Prompt text.
    """
    lines: list[str] = [_INSTRUCTIONS[task], ""]

    lines.append("Indicators (id, name, category):")
    for ind in taxonomy.indicators:
        lines.append(f"{ind.id} {ind.name} [{taxonomy.category(ind.category_id).name}]")
    lines.append("")

    if task in (PromptTask.SENTIMENT, PromptTask.COMBINED):
        lines += [SCALE, ""]

    lines.append("Respond with a JSON object of this shape:")
    lines.append(_SCHEMAS[task])
    lines.append("")

    for k, ex in enumerate(exemplars, start=1):
        lines.append(f"Example {k}")
        lines.append(f"Post: {_dumps(ex.text)}")
        if task is PromptTask.SENTIMENT:
            lines.append("Units:")
            lines += _unit_lines(ex.result.units)
        lines.append(f"Answer: {_dumps(answer_for(task, ex.result))}")
        lines.append("")

    lines.append(f"Post ({entry.platform.value}): {_dumps(entry.text)}")
    if task is PromptTask.SENTIMENT:
        lines.append("Units:")
        lines += _unit_lines(units)
    lines.append("Answer:")
    return "\n".join(lines)
