"""Shared fixtures: a small hand-built TimeML corpus."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tml_fixtures import build_corpus_root  # noqa: E402


@pytest.fixture()
def corpus_root(tmp_path: Path) -> Path:
    return build_corpus_root(tmp_path / "corpus")


@pytest.fixture(scope="session")
def session_corpus_root(tmp_path_factory) -> Path:
    return build_corpus_root(tmp_path_factory.mktemp("corpus"))
