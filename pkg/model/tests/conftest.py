"""Fixtures built from the synthetic query/label generator."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthetic import synthetic_point_corpus, write_jsonl  # noqa: E402


@pytest.fixture()
def point_files(tmp_path):
    queries, labels = synthetic_point_corpus()
    qpath = write_jsonl(tmp_path / "queries.jsonl", [
        {"query_id": q.query_id, "doc_id": q.doc_id, "direction": q.direction, "text": q.text}
        for q in queries
    ])
    lpath = write_jsonl(tmp_path / "point.jsonl", labels)
    return qpath, lpath, queries, labels
