from __future__ import annotations

from pathlib import Path

import pytest

from hqlens.extract.lexicon import SentimentLexicon, default_lexicon_path, load_lexicon
from hqlens.model import Taxonomy, default_taxonomy_path, load_taxonomy

from .factories import SAMPLE_DIR


@pytest.fixture(scope="session")
def taxonomy() -> Taxonomy:
    return load_taxonomy(default_taxonomy_path())


@pytest.fixture(scope="session")
def lexicon() -> SentimentLexicon:
    return load_lexicon(default_lexicon_path())


@pytest.fixture
def sample_dir() -> Path:
    return SAMPLE_DIR


@pytest.fixture
def api_key(monkeypatch: pytest.MonkeyPatch) -> str:
    monkeypatch.setenv("HQLENS_TEST_KEY", "sk-test")
    return "HQLENS_TEST_KEY"
