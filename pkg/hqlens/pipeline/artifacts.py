"""
On-disk stage artifacts and the run manifest.
"""

from __future__ import annotations

import hashlib
import json
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from hqlens.errors import MissingArtifactError

logger = logging.getLogger(__name__)

ENTRIES = "entries.jsonl"
REJECTS = "rejects.jsonl"
INGEST_SUMMARY = "ingest_summary.json"
EXTRACTIONS = "extractions.jsonl"
WEIGHTS = "weights.csv"
ASSIGNMENTS = "assignments.jsonl"
UNASSIGNED = "unassigned.jsonl"
SCORES = "scores.csv"
CITY_SUMMARY = "city_summary.json"
EVALUATION_CSV = "evaluation.csv"
EVALUATION_TXT = "evaluation.txt"
EVALUATION_JSON = "evaluation.json"
INDICATOR_TABLE = "indicator_table.csv"
PLATFORM_DISTRIBUTION = "platform_distribution.csv"
COMMUNITIES_GEOJSON = "communities.geojson"
MANIFEST = "manifest.json"
ERROR_REPORT = "error.json"

ARTIFACTS = (
    ENTRIES,
    REJECTS,
    INGEST_SUMMARY,
    EXTRACTIONS,
    WEIGHTS,
    ASSIGNMENTS,
    UNASSIGNED,
    SCORES,
    CITY_SUMMARY,
    EVALUATION_CSV,
    EVALUATION_TXT,
    EVALUATION_JSON,
    INDICATOR_TABLE,
    PLATFORM_DISTRIBUTION,
    COMMUNITIES_GEOJSON,
)
"""
Every artifact a stage may write, in pipeline order.
"""


def _dumps(obj: Any) -> str:
    """
    Encode one JSON-lines record.

    Parameters
    ----------
    obj : Any
        Record.

    Returns
    -------
    str
        Compact JSON followed by a newline.
    """
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def sha256_file(path: Path) -> str:
    """
    Hex SHA-256 digest of a file.

    Parameters
    ----------
    path : Path
        File to hash.

    Returns
    -------
    str
        Digest.
    """
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True, slots=True)
class ArtifactStore:
    """
    Output directory holding stage artifacts.
    """

    root: Path
    """
    Output directory.
    """

    def path(self, name: str) -> Path:
        """
        Location of an artifact.

        Parameters
        ----------
        name : str
            Artifact file name.

        Returns
        -------
        Path
            Path inside the output directory.
        """
        return self.root / name

    def require(self, stage: str, name: str) -> Path:
        """
        Location of an upstream artifact that must exist.

        Parameters
        ----------
        stage : str
            Stage asking for it.
        name : str
            Artifact file name.

        Returns
        -------
        Path
            Existing path.

        Raises
        ------
        MissingArtifactError
            If the artifact has not been written.
        """
        p = self.path(name)
        if not p.is_file():
            raise MissingArtifactError(stage, name)
        return p

    def prepare(self) -> None:
        """
        Create the output directory.

        Returns
        -------
        None
        """
        self.root.mkdir(parents=True, exist_ok=True)

    def write_jsonl(self, name: str, records: Iterable[dict[str, Any]]) -> Path:
        """
        Write records one per line.

        Parameters
        ----------
        name : str
            Artifact file name.
        records : Iterable[dict[str, Any]]
            Records in output order.

        Returns
        -------
        Path
            Written path.
        """
        p = self.path(name)
        with p.open("w", encoding="utf-8", newline="\n") as fh:
            for record in records:
                fh.write(_dumps(record))
        return p

    def read_jsonl(self, stage: str, name: str) -> list[dict[str, Any]]:
        """
        Read an upstream JSON-lines artifact.

        Parameters
        ----------
        stage : str
            Stage asking for it.
        name : str
            Artifact file name.

        Returns
        -------
        list[dict[str, Any]]
            Records in file order.
        """
        p = self.require(stage, name)
        with p.open(encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def write_json(self, name: str, obj: Any) -> Path:
        """
        Write an indented JSON document.

        Parameters
        ----------
        name : str
            Artifact file name.
        obj : Any
            Document.

        Returns
        -------
        Path
            Written path.
        """
        return self.write_text(
            name, json.dumps(obj, ensure_ascii=False, indent=2) + "\n"
        )

    def write_text(self, name: str, text: str) -> Path:
        """
        Write a text artifact.

        Parameters
        ----------
        name : str
            Artifact file name.
        text : str
            Content.

        Returns
        -------
        Path
            Written path.
        """
        p = self.path(name)
        p.write_text(text, encoding="utf-8", newline="\n")
        return p

    def write_manifest(self, config_digest: str) -> Path:
        """
        Record the config hash and checksums of present artifacts.

        Parameters
        ----------
        config_digest : str
            Hash of the run configuration.

        Returns
        -------
        Path
            Manifest path.
        """
        checksums = {
            name: sha256_file(self.path(name))
            for name in ARTIFACTS
            if self.path(name).is_file()
        }
        logger.debug("Manifest covers %d artifacts", len(checksums))
        return self.write_json(
            MANIFEST, {"config_hash": config_digest, "artifacts": checksums}
        )
