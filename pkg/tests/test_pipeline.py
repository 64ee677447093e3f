from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import pytest

from hqlens.__main__ import main
from hqlens.config import RunConfig
from hqlens.config.loader import load_run_config
from hqlens.pipeline import (
    ARTIFACTS,
    COMMANDS,
    EXIT_CONFIG_FAILURE,
    EXIT_OK,
    EXIT_STAGE_FAILURE,
    run,
)

from .factories import SAMPLE_DIR, write_sample_config


def _config(out: Path, *, workers: int | None = None) -> RunConfig:
    cfg = load_run_config(SAMPLE_DIR / "config.json", output_dir=str(out))
    if workers is not None:
        cfg = dataclasses.replace(cfg, workers=workers)
    return cfg


def _outputs(out: Path) -> dict[str, bytes]:
    return {
        name: (out / name).read_bytes()
        for name in (*ARTIFACTS, "manifest.json")
        if (out / name).is_file()
    }


def _lines(path: Path) -> list[dict[str, object]]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_all_writes_every_artifact(tmp_path: Path) -> None:
    out = tmp_path / "out"
    assert run("all", _config(out)) == EXIT_OK
    assert set(_outputs(out)) == {*ARTIFACTS, "manifest.json"}
    assert not (out / "error.json").exists()
    assert len(_lines(out / "entries.jsonl")) == 50

    summary = json.loads((out / "ingest_summary.json").read_text(encoding="utf-8"))
    assert summary["entries"] == 50
    assert set(summary["platforms"]) == {"review_site", "microblog", "gov_board"}

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert set(manifest["artifacts"]) == set(ARTIFACTS)
    assert len(manifest["config_hash"]) == 64


def test_scores_stay_in_range(tmp_path: Path) -> None:
    out = tmp_path / "out"
    assert run("all", _config(out)) == EXIT_OK
    rows = (out / "scores.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "community_id,total,coverage"
    assert len(rows) > 1
    for row in rows[1:]:
        _, total, coverage = row.split(",")
        assert 1.0 <= float(total) <= 5.0
        assert float(coverage) > 0

    city = json.loads((out / "city_summary.json").read_text(encoding="utf-8"))
    assert 1.0 <= city["mean_total"] <= 5.0
    assert city["total_communities"] == 7


def test_oracle_baseline_is_perfect(tmp_path: Path) -> None:
    out = tmp_path / "out"
    assert run("all", _config(out)) == EXIT_OK
    header, *rows = (out / "evaluation.csv").read_text(encoding="utf-8").splitlines()
    assert header == "metric,rule,oracle"
    by_metric = {row.split(",")[0]: row.split(",")[1:] for row in rows}
    assert by_metric["complete"] == ["true", "true"]
    assert by_metric["relevance_accuracy"][1] == "1.0"


def test_runs_are_byte_identical(tmp_path: Path) -> None:
    outputs = []
    for k, workers in enumerate((1, 4, 8)):
        out = tmp_path / f"run{k}"
        assert run("all", _config(out, workers=workers)) == EXIT_OK
        outputs.append(_outputs(out))
    assert outputs[0] == outputs[1] == outputs[2]
    assert set(outputs[0]) == {*ARTIFACTS, "manifest.json"}


def test_all_equals_stage_by_stage(tmp_path: Path) -> None:
    whole, staged = tmp_path / "whole", tmp_path / "staged"
    assert run("all", _config(whole)) == EXIT_OK
    cfg = _config(staged)
    for command in COMMANDS:
        if command != "all":
            assert run(command, cfg) == EXIT_OK
    assert _outputs(whole) == _outputs(staged)


def test_stage_without_upstream_artifact(tmp_path: Path) -> None:
    out = tmp_path / "out"
    cfg = _config(out)
    assert run("ingest", cfg) == EXIT_OK
    assert run("extract", cfg) == EXIT_OK
    assert run("score", cfg) == EXIT_STAGE_FAILURE

    report = json.loads((out / "error.json").read_text(encoding="utf-8"))
    assert report["status"] == "error"
    assert report["stage"] == "score"
    assert report["exit_code"] == EXIT_STAGE_FAILURE
    assert "missing upstream artifact weights.csv" in report["message"]

    assert run("weights", cfg) == EXIT_OK
    assert not (out / "error.json").exists()


def test_evaluate_is_skipped_without_gold(tmp_path: Path) -> None:
    out = tmp_path / "out"
    cfg = dataclasses.replace(_config(out), gold=None)
    assert run("evaluate", cfg) == EXIT_OK
    assert not (out / "evaluation.csv").exists()


def test_cli_runs_all(tmp_path: Path) -> None:
    out = tmp_path / "out"
    code = main(
        ["all", "--config", str(SAMPLE_DIR / "config.json"), "--output-dir", str(out)]
    )
    assert code == EXIT_OK
    assert (out / "communities.geojson").is_file()


def test_cli_reports_config_failure(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    p = write_sample_config(tmp_path, taxonomy="nope.json")

    code = main(["ingest", "--config", str(p), "--output-dir", str(tmp_path)])
    assert code == EXIT_CONFIG_FAILURE
    report = json.loads((tmp_path / "error.json").read_text(encoding="utf-8"))
    assert report["field"] == "taxonomy"
    assert '"exit_code": 2' in capsys.readouterr().err


def test_cli_rejects_unknown_backend(tmp_path: Path) -> None:
    code = main(
        [
            "ingest",
            "--config",
            str(SAMPLE_DIR / "config.json"),
            "--output-dir",
            str(tmp_path),
            "--backend",
            "bert",
        ]
    )
    assert code == EXIT_CONFIG_FAILURE


def test_cli_rejects_unknown_log_level(tmp_path: Path) -> None:
    code = main(
        [
            "ingest",
            "--config",
            str(SAMPLE_DIR / "config.json"),
            "--output-dir",
            str(tmp_path),
            "--log-level",
            "chatty",
        ]
    )
    assert code == EXIT_CONFIG_FAILURE
    report = json.loads((tmp_path / "error.json").read_text(encoding="utf-8"))
    assert report["field"] == "log_level"


def test_malformed_poi_file_fails_score_stage(tmp_path: Path) -> None:
    pois = tmp_path / "pois.csv"
    pois.write_text("name,lat,lon,community_id\nCorner Shop,39.9\n", encoding="utf-8")
    out = tmp_path / "out"
    cfg = load_run_config(
        write_sample_config(tmp_path, pois=str(pois)), output_dir=str(out)
    )
    assert run("all", cfg) == EXIT_STAGE_FAILURE
    report = json.loads((out / "error.json").read_text(encoding="utf-8"))
    assert report["stage"] == "score"
    assert report["error"] == "GeoError"
    assert "pois.csv:2:" in report["message"]
