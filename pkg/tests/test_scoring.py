from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from hqlens.model import IndicatorId, Taxonomy
from hqlens.scoring import (
    CommunityScore,
    CommunitySentiment,
    city_summary,
    community_sentiment,
    read_scores_csv,
    score_communities,
    total_score,
    write_scores_csv,
)
from hqlens.weights import WeightTable

from .factories import make_unit


def _uniform(taxonomy: Taxonomy) -> WeightTable:
    return WeightTable.uniform(taxonomy.indicator_ids())


def _random_weights(rng: random.Random, ids: list[IndicatorId]) -> WeightTable:
    raw = [rng.random() for _ in ids]
    total = math.fsum(raw)
    return WeightTable(weights={i: r / total for i, r in zip(ids, raw, strict=True)})


def test_neutral_fixed_point(taxonomy: Taxonomy) -> None:
    score = total_score(CommunitySentiment("c", {}), _uniform(taxonomy))
    assert score.total == 3.0
    assert score.coverage == 0.0


@pytest.mark.parametrize("s, expected", [(2.0, 5.0), (-2.0, 1.0)])
def test_range_endpoints(taxonomy: Taxonomy, s: float, expected: float) -> None:
    means = {i: s for i in taxonomy.indicator_ids()}
    score = total_score(CommunitySentiment("c", means), _uniform(taxonomy))
    assert score.total == expected
    assert score.coverage == 1.0


def test_hand_example() -> None:
    a, b = IndicatorId(1, 1), IndicatorId(1, 2)
    weights = WeightTable(weights={a: 0.6, b: 0.4})
    score = total_score(CommunitySentiment("c", {a: 1.0, b: -2.0}), weights)
    assert score.total == pytest.approx(2.8)
    assert score.contributions[a] == pytest.approx(2.4)
    assert score.contributions[b] == pytest.approx(0.4)


def test_random_inputs_match_identity(taxonomy: Taxonomy) -> None:
    rng = random.Random(11)
    ids = taxonomy.indicator_ids()
    for _ in range(1000):
        weights = _random_weights(rng, ids)
        mentioned = rng.sample(ids, rng.randint(0, len(ids)))
        means = {i: rng.uniform(-2.0, 2.0) for i in mentioned}
        score = total_score(CommunitySentiment("c", means), weights)
        identity = 3.0 + sum(w * means.get(i, 0.0) for i, w in weights.weights.items())
        absolute = sum(
            w * abs(means.get(i, 0.0) + 3.0) for i, w in weights.weights.items()
        )
        assert 1.0 <= score.total <= 5.0
        assert score.total == pytest.approx(identity, abs=1e-9)
        assert score.total == pytest.approx(absolute, abs=1e-9)
        assert math.fsum(score.contributions.values()) == pytest.approx(
            score.total, abs=1e-9
        )


def test_monotone_in_sentiment(taxonomy: Taxonomy) -> None:
    weights = _uniform(taxonomy)
    key = IndicatorId(4, 1)
    low = total_score(CommunitySentiment("c", {key: -1.0}), weights)
    high = total_score(CommunitySentiment("c", {key: 0.5}), weights)
    assert high.total > low.total


def test_weights_must_sum_to_one() -> None:
    weights = WeightTable(weights={IndicatorId(1, 1): 0.5})
    with pytest.raises(ValueError, match="sum"):
        total_score(CommunitySentiment("c", {}), weights)


def test_community_sentiment_means() -> None:
    units = [make_unit("4.1", 2), make_unit("4.1", 0), make_unit("8.1", -2)]
    sentiment = community_sentiment("C01", units)
    assert sentiment.means == {IndicatorId(4, 1): 1.0, IndicatorId(8, 1): -2.0}
    assert sentiment.unit_count == 3
    assert IndicatorId(1, 3) not in sentiment.mentioned


def test_score_communities_skips_empty(taxonomy: Taxonomy) -> None:
    scores = score_communities(
        {"B": [make_unit("4.1", -2)], "A": [make_unit("2.1", 2)], "C": []},
        _uniform(taxonomy),
    )
    assert [s.community_id for s in scores] == ["A", "B"]
    assert scores[0].total > 3.0 > scores[1].total
    assert scores[0].coverage == pytest.approx(1 / 46)


def test_city_mean(taxonomy: Taxonomy) -> None:
    summary = city_summary(
        [CommunityScore("a", 3.0), CommunityScore("b", 3.8)],
        taxonomy,
        total_communities=5,
    )
    assert summary.mean_total == pytest.approx(3.4)
    assert summary.covered == 2
    assert summary.total_communities == 5
    assert len(summary.deciles) == 9
    wire = summary.to_wire()
    assert wire["covered_communities"] == 2
    assert len(wire["category_ranking"]) == 11


def test_single_score_summary(taxonomy: Taxonomy) -> None:
    summary = city_summary([CommunityScore("a", 4.2)], taxonomy)
    assert summary.mean_total == 4.2
    assert set(summary.deciles) == {4.2}
    assert summary.total_communities == 1


def test_planted_category_ranking(taxonomy: Taxonomy) -> None:
    weights = _uniform(taxonomy)
    planted = {
        IndicatorId(5, 1): 2.0,
        IndicatorId(2, 1): 1.0,
        IndicatorId(8, 1): -1.0,
        IndicatorId(4, 1): -2.0,
    }
    units = [
        make_unit(str(ind), int(s), entry_id=f"e{k}")
        for k, (ind, s) in enumerate(planted.items())
    ]
    scores = score_communities({"A": units, "B": units}, weights)
    summary = city_summary(scores, taxonomy, weights=weights)
    ranking = [c.category_id for c in summary.categories]
    assert ranking[0] == 5
    assert ranking[1] == 2
    assert ranking[-2] == 8
    assert ranking[-1] == 4
    assert summary.categories[0].name == "Public Facilities and Resources"
    assert summary.categories[-1].name == "Parking"


def test_empty_summary(taxonomy: Taxonomy) -> None:
    with pytest.raises(ValueError):
        city_summary([], taxonomy)


def test_scores_csv_round_trip(tmp_path: Path) -> None:
    scores = [CommunityScore("C02", 2.75, coverage=0.5), CommunityScore("C01", 3.1)]
    path = tmp_path / "scores.csv"
    write_scores_csv(path, scores)
    back = read_scores_csv(path)
    assert [(s.community_id, s.total, s.coverage) for s in back] == [
        ("C01", 3.1, 0.0),
        ("C02", 2.75, 0.5),
    ]
