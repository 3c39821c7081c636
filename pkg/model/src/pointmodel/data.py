"""Line-delimited JSON file formats shared with the conversion toolkit.

Queries: {query_id, doc_id, direction, text}. Point datasets:
{doc_id, source_entity, source_side, target_entity, target_side, relation,
provenance}. Interval datasets drop the side fields. Probability files:
{query_id, p_before, p_equal, p_after}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

POINT_LABELS = ("<", "=", ">")
POINT_INVERSE = {"<": ">", "=": "=", ">": "<"}
INTERVAL_LABELS = (
    "before", "after", "meets", "met-by", "starts", "started-by",
    "finishes", "finished-by", "contains", "during", "equals",
)


class DataFormatError(Exception):
    pass


@dataclass(frozen=True)
class Query:
    query_id: str
    doc_id: str
    direction: str
    text: str


def read_queries(path: Path | str) -> list[Query]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        try:
            out.append(Query(rec["query_id"], rec["doc_id"], rec["direction"], rec["text"]))
        except KeyError as exc:
            raise DataFormatError(f"query record missing field {exc}") from exc
    return out


def read_point_labels(path: Path | str) -> dict[tuple[str, str, str], str]:
    """(doc_id, source point, target point) -> point relation, both directions."""
    table: dict[tuple[str, str, str], str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        try:
            source = f"{rec['source_entity']}.{rec['source_side']}"
            target = f"{rec['target_entity']}.{rec['target_side']}"
            relation = rec["relation"]
        except KeyError as exc:
            raise DataFormatError(f"point record missing field {exc}") from exc
        if relation not in POINT_LABELS:
            raise DataFormatError(f"unknown point relation {relation!r}")
        table.setdefault((rec["doc_id"], source, target), relation)
        table.setdefault((rec["doc_id"], target, source), POINT_INVERSE[relation])
    return table


def read_interval_labels(path: Path | str) -> dict[tuple[str, str, str], str]:
    table: dict[tuple[str, str, str], str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        try:
            key = (rec["doc_id"], rec["source_entity"], rec["target_entity"])
            relation = rec["relation"]
        except KeyError as exc:
            raise DataFormatError(f"interval record missing field {exc}") from exc
        if relation not in INTERVAL_LABELS:
            raise DataFormatError(f"unknown interval relation {relation!r}")
        table.setdefault(key, relation)
    return table


def parse_point_query_id(query_id: str) -> tuple[str, str, str, str]:
    doc_id, x, y, direction = query_id.rsplit("|", 3)
    return doc_id, x, y, direction


def point_label_for_query(query: Query, labels: dict) -> Optional[str]:
    """Gold point relation as seen by this query, if annotated.

    A swapped query presents the pair in (y, x) order, so its gold label is
    the inverse of the stored relation.
    """
    doc_id, x, y, direction = parse_point_query_id(query.query_id)
    relation = labels.get((doc_id, x, y))
    if relation is None:
        return None
    return POINT_INVERSE[relation] if direction == "swapped" else relation


def interval_label_for_query(query: Query, labels: dict) -> Optional[str]:
    doc_id, x, y, _ = parse_point_query_id(query.query_id)
    return labels.get((doc_id, x, y))


def write_probability_file(path: Path | str, records: Iterable[dict]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
