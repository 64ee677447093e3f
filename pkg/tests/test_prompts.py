from __future__ import annotations

import json

from hqlens.extract.prompts import Exemplar, PromptTask, answer_for, build_prompt
from hqlens.model import Taxonomy

from .factories import make_entry, make_result


def _exemplars(n: int) -> list[Exemplar]:
    return [
        Exemplar(
            text=f"Parking post {k}",
            result=make_result(f"review_site:x{k}", ("4.1", -1)),
        )
        for k in range(n)
    ]


def test_every_indicator_listed_once(taxonomy: Taxonomy) -> None:
    prompt = build_prompt(PromptTask.COMBINED, make_entry(), taxonomy)
    lines = prompt.splitlines()
    for ind in taxonomy.indicators:
        prefix = f"{ind.id} {ind.name} ["
        assert sum(1 for line in lines if line.startswith(prefix)) == 1
    assert lines[-1] == "Answer:"


def test_few_shot_blocks(taxonomy: Taxonomy) -> None:
    prompt = build_prompt(
        PromptTask.COMBINED, make_entry(), taxonomy, _exemplars(10)
    )
    blocks = [line for line in prompt.splitlines() if line.startswith("Example ")]
    assert blocks == [f"Example {k}" for k in range(1, 11)]
    assert prompt.count("Answer: {") == 10


def test_prompt_is_deterministic(taxonomy: Taxonomy) -> None:
    entry = make_entry(text="停车位太少了")
    first = build_prompt(PromptTask.COMBINED, entry, taxonomy, _exemplars(3))
    second = build_prompt(PromptTask.COMBINED, entry, taxonomy, _exemplars(3))
    assert first == second
    assert "停车位太少了" in first


def test_zero_shot_has_no_examples(taxonomy: Taxonomy) -> None:
    prompt = build_prompt(PromptTask.RELEVANCE, make_entry(), taxonomy)
    assert "Example 1" not in prompt
    assert "Sentiment scale" not in prompt


def test_sentiment_prompt_lists_units(taxonomy: Taxonomy) -> None:
    result = make_result("review_site:e1", ("4.1", -1), ("8.1", 0))
    prompt = build_prompt(
        PromptTask.SENTIMENT, make_entry(), taxonomy, units=result.units
    )
    assert "unit 1:" in prompt
    assert "indicator=8.1" in prompt
    assert "Sentiment scale" in prompt


def test_answer_for_each_task() -> None:
    result = make_result("review_site:e1", ("4.1", -1))
    assert answer_for(PromptTask.RELEVANCE, result) == {"relevant": True}
    assert answer_for(PromptTask.SENTIMENT, result) == {"sentiments": [-1]}
    (unit,) = answer_for(PromptTask.EXTRACTION, result)["units"]
    assert "sentiment" not in unit
    combined = answer_for(PromptTask.COMBINED, result)
    assert json.loads(json.dumps(combined))["units"][0]["indicator"] == "4.1"
