"""Tagged-text construction for the point and interval classifiers.

Every query is the full document text prefixed with a creation-time
preamble; the two queried entities are wrapped in XML-style marker tags.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import PointEndpoint, Side
from .corpus import Document, EntityKind, TemporalEntity


class UnknownEntity(Exception):
    pass


class OverlappingSpans(Exception):
    pass


DCT_ANCHOR = "<dct>"
DCT_PREAMBLE = f"Document creation time: {DCT_ANCHOR} "

# The eight endpoint marker tags plus the four interval marker tags.
POINT_TAGS = tuple(
    f"<{close}{family}{side}>"
    for family in "xy" for side in "se" for close in ("", "/")
)
INTERVAL_TAGS = ("<x>", "</x>", "<y>", "</y>")


class Direction(enum.Enum):
    FORWARD = "forward"
    SWAPPED = "swapped"


@dataclass(frozen=True)
class TaggedQuery:
    query_id: str
    doc_id: str
    text: str
    direction: Direction


def _entity_span(doc: Document, entity: TemporalEntity) -> tuple[int, int]:
    """Span of the entity in the preambled text; the DCT anchors on <dct>."""
    if entity.kind is EntityKind.DCT:
        start = DCT_PREAMBLE.index(DCT_ANCHOR)
        return start, start + len(DCT_ANCHOR)
    assert entity.span is not None
    start, end = entity.span
    return start + len(DCT_PREAMBLE), end + len(DCT_PREAMBLE)


def _resolve(doc: Document, entity_id: str) -> TemporalEntity:
    try:
        return doc.entity(entity_id)
    except KeyError:
        raise UnknownEntity(f"{entity_id} not in document {doc.id}") from None


def _insert_tags(text: str, spans: Sequence[tuple[int, int, str, str]]) -> str:
    """Wrap each (start, end, open_tag, close_tag) span; spans must not cross."""
    ordered = sorted(spans)
    for (s1, e1, *_), (s2, _, *_) in zip(ordered, ordered[1:]):
        if s2 < e1:
            raise OverlappingSpans(f"spans {(s1, e1)} and starting {s2} cross")
    out = text
    for start, end, open_tag, close_tag in sorted(spans, reverse=True):
        out = out[:start] + f"{open_tag} " + out[start:end] + f" {close_tag}" + out[end:]
    return out


def point_query_id(doc_id: str, x: PointEndpoint, y: PointEndpoint, direction: Direction) -> str:
    return f"{doc_id}|{x}|{y}|{direction.value}"


def tag_point_pair(
    doc: Document, x: PointEndpoint, y: PointEndpoint, direction: Direction = Direction.FORWARD
) -> TaggedQuery:
    """Mark the two queried endpoints in the preambled document text.

    Forward puts x-family tags (with the queried side) on x's entity and
    y-family tags on y's entity. Swapped exchanges the tag families and
    sides, producing the query whose prediction, read back through the
    anti-diagonal, estimates the same pair.
    """
    if x.entity_id == y.entity_id:
        raise UnknownEntity("queried endpoints must belong to distinct entities")
    x_ent = _resolve(doc, x.entity_id)
    y_ent = _resolve(doc, y.entity_id)
    text = DCT_PREAMBLE + doc.text
    if direction is Direction.FORWARD:
        spans = [
            (*_entity_span(doc, x_ent), f"<x{x.side}>", f"</x{x.side}>"),
            (*_entity_span(doc, y_ent), f"<y{y.side}>", f"</y{y.side}>"),
        ]
    else:
        spans = [
            (*_entity_span(doc, y_ent), f"<x{y.side}>", f"</x{y.side}>"),
            (*_entity_span(doc, x_ent), f"<y{x.side}>", f"</y{x.side}>"),
        ]
    return TaggedQuery(
        query_id=point_query_id(doc.id, x, y, direction),
        doc_id=doc.id,
        text=_insert_tags(text, spans),
        direction=direction,
    )


def tag_interval_pair(doc: Document, x_id: str, y_id: str) -> TaggedQuery:
    """Untyped entity tagging used by the interval baseline models."""
    if x_id == y_id:
        raise UnknownEntity("queried entities must be distinct")
    x_ent = _resolve(doc, x_id)
    y_ent = _resolve(doc, y_id)
    text = DCT_PREAMBLE + doc.text
    spans = [
        (*_entity_span(doc, x_ent), "<x>", "</x>"),
        (*_entity_span(doc, y_ent), "<y>", "</y>"),
    ]
    return TaggedQuery(
        query_id=f"{doc.id}|{x_id}|{y_id}|interval",
        doc_id=doc.id,
        text=_insert_tags(text, spans),
        direction=Direction.FORWARD,
    )


_STRIP_RE = re.compile(
    "|".join(
        [re.escape(tag) + " " for tag in POINT_TAGS + INTERVAL_TAGS if "/" not in tag]
        + [" " + re.escape(tag) for tag in POINT_TAGS + INTERVAL_TAGS if "/" in tag]
    )
)


def strip_tags(text: str) -> str:
    """Remove marker tags (with their inserted spaces); inverse of tagging."""
    return _STRIP_RE.sub("", text)


def truncate_around_tags(text: str, max_chars: int) -> str:
    """Keep the preamble plus a window centered on the marked spans.

    Used when a downstream model has a length budget; tags are always
    preserved.
    """
    if len(text) <= max_chars:
        return text
    positions = [m.span() for m in re.finditer("|".join(map(re.escape, POINT_TAGS + INTERVAL_TAGS)), text)]
    if not positions:
        return text[:max_chars]
    lo = min(s for s, _ in positions)
    hi = max(e for _, e in positions)
    preamble_end = len(DCT_PREAMBLE) if text.startswith(DCT_PREAMBLE) else 0
    budget = max_chars - preamble_end
    if hi - lo >= budget:
        return text[:preamble_end] + text[lo:lo + budget]
    margin = (budget - (hi - lo)) // 2
    start = max(preamble_end, lo - margin)
    end = min(len(text), start + budget)
    start = max(preamble_end, end - budget)
    return text[:preamble_end] + text[start:end]


def write_queries(path: Path | str, queries: Iterable[TaggedQuery]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps({
                "query_id": q.query_id,
                "doc_id": q.doc_id,
                "direction": q.direction.value,
                "text": q.text,
            }, sort_keys=True) + "\n")


def read_queries(path: Path | str) -> list[TaggedQuery]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(TaggedQuery(rec["query_id"], rec["doc_id"], rec["text"], Direction(rec["direction"])))
    return out
