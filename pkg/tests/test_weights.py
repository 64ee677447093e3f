from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from hqlens.config import WeightConfig
from hqlens.errors import DegenerateMassError
from hqlens.model import IndicatorId, Taxonomy
from hqlens.weights import (
    IndicatorStats,
    WeightTable,
    compute_weights,
    indicator_stats,
    log_frequency,
    read_weights_csv,
    weights_or_uniform,
    write_weights_csv,
)

from .factories import make_unit


def _stats(*rows: tuple[int, float]) -> list[IndicatorStats]:
    return [
        IndicatorStats(
            indicator_id=IndicatorId(1, k),
            frequency=freq,
            mean_abs_sentiment=importance,
            abs_mean_sentiment=importance,
        )
        for k, (freq, importance) in enumerate(rows, start=1)
    ]


def _random_stats(rng: random.Random) -> list[IndicatorStats]:
    n = rng.randint(1, 50)
    rows = [(rng.randint(0, 100_000), rng.uniform(0.0, 2.0)) for _ in range(n)]
    rows[0] = (rng.randint(1, 100_000), rng.uniform(0.1, 2.0))
    return _stats(*rows)


def test_indicator_stats(taxonomy: Taxonomy) -> None:
    units = [make_unit("4.1", s) for s in (-2, -2, 2)]
    rows = {r.indicator_id: r for r in indicator_stats(units, taxonomy)}
    assert len(rows) == 46
    parking = rows[IndicatorId(4, 1)]
    assert parking.frequency == 3
    assert parking.mean_abs_sentiment == 2.0
    assert parking.mean_sentiment == pytest.approx(-2 / 3)
    assert parking.abs_mean_sentiment == pytest.approx(2 / 3)
    assert parking.importance("abs_mean") == pytest.approx(2 / 3)
    empty = rows[IndicatorId(10, 4)]
    assert (empty.frequency, empty.mean_abs_sentiment, empty.mean_sentiment) == (
        0,
        0.0,
        0.0,
    )


def test_indicator_stats_rejects_unknown_indicator(taxonomy: Taxonomy) -> None:
    with pytest.raises(KeyError):
        indicator_stats([make_unit("12.1", 1)], taxonomy)


def test_high_frequency_indicator(taxonomy: Taxonomy) -> None:
    units = [make_unit("4.1", -1)] * 22943
    rows = indicator_stats(units, taxonomy)
    assert max(r.frequency for r in rows) == 22943


def test_log_frequency() -> None:
    assert log_frequency(0) == 0.0
    assert log_frequency(1) == pytest.approx(0.6931471805599453)
    assert log_frequency(22943) == pytest.approx(10.0408, abs=1e-4)
    assert log_frequency(99, base=10) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        log_frequency(-1)


def test_hand_examples() -> None:
    table = compute_weights(_stats((4, 1.0), (4, 1.0)))
    assert list(table.weights.values()) == pytest.approx([0.5, 0.5])

    literal = WeightConfig(use_log_frequency=False)
    table = compute_weights(_stats((1, 2.0), (1, 1.0)), literal)
    assert list(table.weights.values()) == pytest.approx([2 / 3, 1 / 3])


def test_zero_frequency_gets_zero_weight() -> None:
    table = compute_weights(_stats((3, 1.0), (0, 0.0)))
    assert table.weight(IndicatorId(1, 2)) == 0.0
    assert table.weight(IndicatorId(1, 1)) == pytest.approx(1.0)
    assert table.weight(IndicatorId(9, 9)) == 0.0


def test_matches_brute_force() -> None:
    rng = random.Random(2024)
    for _ in range(200):
        stats = _random_stats(rng)
        masses = [s.mean_abs_sentiment * math.log(s.frequency + 1) for s in stats]
        expected = [m / sum(masses) for m in masses]
        table = compute_weights(stats)
        got = [table.weight(s.indicator_id) for s in stats]
        assert got == pytest.approx(expected, rel=0, abs=1e-12)
        assert table.total() == pytest.approx(1.0, abs=1e-9)
        assert all(w >= 0 for w in got)


def test_log_base_invariance() -> None:
    rng = random.Random(5)
    for _ in range(200):
        stats = _random_stats(rng)
        natural = compute_weights(stats)
        decimal = compute_weights(stats, WeightConfig(log_base=10.0))
        for key, w in natural.weights.items():
            assert decimal.weight(key) == pytest.approx(w, rel=0, abs=1e-9)


def test_importance_scale_invariance() -> None:
    rng = random.Random(6)
    for _ in range(200):
        stats = _random_stats(rng)
        c = rng.uniform(0.1, 10.0)
        scaled = [
            IndicatorStats(
                indicator_id=s.indicator_id,
                frequency=s.frequency,
                mean_abs_sentiment=s.mean_abs_sentiment * c,
            )
            for s in stats
        ]
        base = compute_weights(stats)
        for key, w in compute_weights(scaled).weights.items():
            assert w == pytest.approx(base.weight(key), rel=0, abs=1e-9)


def test_monotone_in_frequency() -> None:
    before = compute_weights(_stats((5, 1.0), (5, 1.5), (2, 0.5)))
    after = compute_weights(_stats((6, 1.0), (5, 1.5), (2, 0.5)))
    key = IndicatorId(1, 1)
    assert after.weight(key) > before.weight(key)


def test_degenerate_mass() -> None:
    stats = _stats((3, 0.0), (7, 0.0))
    with pytest.raises(DegenerateMassError):
        compute_weights(stats)
    fallback = weights_or_uniform(stats)
    assert fallback == WeightTable.uniform([IndicatorId(1, 1), IndicatorId(1, 2)])
    assert fallback.weight(IndicatorId(1, 2)) == 0.5


def test_uniform_needs_indicators() -> None:
    with pytest.raises(ValueError):
        WeightTable.uniform([])


def test_csv_round_trip(tmp_path: Path, taxonomy: Taxonomy) -> None:
    units = [make_unit("4.1", -2), make_unit("4.1", 1), make_unit("2.3", -1)]
    stats = indicator_stats(units, taxonomy)
    table = compute_weights(stats)
    path = tmp_path / "weights.csv"
    write_weights_csv(path, stats, table)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "indicator_id,F,F',I,W"
    assert len(lines) == 47
    assert lines[1].startswith("1.1,0,0.0,0.0,0.0")
    assert read_weights_csv(path) == table


def test_csv_short_row(tmp_path: Path) -> None:
    path = tmp_path / "weights.csv"
    path.write_text("indicator_id,F,F',I,W\n4.1,2,1.09\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_weights_csv(path)
