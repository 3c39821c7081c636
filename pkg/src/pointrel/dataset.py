"""Point- and interval-level training set construction.

Converts annotated documents into endpoint-pair examples and materializes
the four training sets: raw, inverse-augmented, closure-augmented, and
inverse+closure-augmented.
"""

from __future__ import annotations

import enum
import json
import logging
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .algebra import (
    AllenRelation,
    EndpointPairKey,
    InconsistencyError,
    IntervalAssertion,
    PointEndpoint,
    PointGraph,
    PointRelation,
    Side,
    interval_closure,
    interval_to_points,
    invert_interval,
    point_closure,
)
from .corpus import Document

log = logging.getLogger(__name__)


class Provenance(enum.Enum):
    ANNOTATED = "annotated"
    INVERSE = "inverse"
    CLOSURE = "closure"


def pair_key_for(source_side: Side, target_side: Side) -> EndpointPairKey:
    return EndpointPairKey(source_side.value + target_side.value)


@dataclass(frozen=True)
class PointExample:
    doc_id: str
    source: PointEndpoint
    target: PointEndpoint
    relation: PointRelation
    provenance: Provenance

    @property
    def pair_key(self) -> EndpointPairKey:
        return pair_key_for(self.source.side, self.target.side)

    def inverted(self, provenance: Optional[Provenance] = None) -> "PointExample":
        return PointExample(
            self.doc_id,
            self.target,
            self.source,
            self.relation.invert(),
            provenance or self.provenance,
        )

    def fact_key(self) -> tuple:
        """Directional identity: (doc, source, target, relation)."""
        return (self.doc_id, self.source, self.target, self.relation)


@dataclass(frozen=True)
class IntervalExample:
    doc_id: str
    source: str
    target: str
    relation: AllenRelation
    provenance: Provenance

    def inverted(self, provenance: Optional[Provenance] = None) -> "IntervalExample":
        return IntervalExample(
            self.doc_id,
            self.target,
            self.source,
            invert_interval(self.relation),
            provenance or self.provenance,
        )

    def fact_key(self) -> tuple:
        return (self.doc_id, self.source, self.target, self.relation)


_SIDE_PAIRS = (
    (Side.START, Side.START),
    (Side.START, Side.END),
    (Side.END, Side.START),
    (Side.END, Side.END),
)


def intervals_to_points(docs: Iterable[Document]) -> list[PointExample]:
    """Decompose every gold link into its four endpoint-pair examples.

    Exact duplicates are dropped; contradictory duplicates (same endpoints,
    different relation) keep the first occurrence and log the conflict.
    """
    out: list[PointExample] = []
    seen: dict[tuple, PointRelation] = {}
    for doc in docs:
        for link in doc.tlinks:
            quad = interval_to_points(link.relation)
            for (src_side, tgt_side), relation in zip(_SIDE_PAIRS, quad):
                example = PointExample(
                    doc.id,
                    PointEndpoint(link.source, src_side),
                    PointEndpoint(link.target, tgt_side),
                    relation,
                    Provenance.ANNOTATED,
                )
                pair = (doc.id, example.source, example.target)
                if pair in seen:
                    if seen[pair] is not relation:
                        log.warning(
                            "%s: contradictory annotations for (%s, %s), keeping %s",
                            doc.id, example.source, example.target, seen[pair].value,
                        )
                    continue
                seen[pair] = relation
                out.append(example)
    return out


def augment_inverse(examples: Sequence) -> list:
    """Add the swapped, relation-inverted twin of every example.

    Works for both point and interval examples. Deduplicates on the
    directional fact key, so applying it twice is a no-op.
    """
    out: list = []
    seen: set[tuple] = set()
    for example in examples:
        if example.fact_key() not in seen:
            seen.add(example.fact_key())
            out.append(example)
    for example in list(out):
        twin = example.inverted(provenance=Provenance.INVERSE)
        if twin.fact_key() not in seen:
            seen.add(twin.fact_key())
            out.append(twin)
    return out


def _doc_graph(examples: Iterable[PointExample]) -> tuple[PointGraph, set[str]]:
    graph = PointGraph()
    entities: set[str] = set()
    for ex in examples:
        entities.add(ex.source.entity_id)
        entities.add(ex.target.entity_id)
        graph.add(ex.source, ex.relation, ex.target)
    for entity in entities:
        graph.add(
            PointEndpoint(entity, Side.START),
            PointRelation.BEFORE,
            PointEndpoint(entity, Side.END),
        )
    return graph, entities


def augment_closure(docs: Iterable[Document], examples: Sequence[PointExample]) -> list[PointExample]:
    """Add every definite point relation derivable per document.

    Derived edges are canonicalized so their relation is < or = (never >),
    mirroring the closure tool behavior the published counts stem from.
    Entity-internal edges are never emitted; a document whose annotations
    are inconsistent contributes only its original examples.
    """
    by_doc: dict[str, list[PointExample]] = {}
    for ex in examples:
        by_doc.setdefault(ex.doc_id, []).append(ex)

    out = list(examples)
    known = {ex.fact_key() for ex in examples}
    for doc_id in sorted(by_doc):
        doc_examples = by_doc[doc_id]
        try:
            graph, _ = _doc_graph(doc_examples)
            closed = point_closure(graph)
        except InconsistencyError as exc:
            log.warning("%s: inconsistent annotations, skipping closure (%s)", doc_id, exc)
            continue
        for a, relation, b in closed.edge_items():
            if a.entity_id == b.entity_id:
                continue
            if relation is PointRelation.AFTER:
                a, b, relation = b, a, PointRelation.BEFORE
            elif relation is PointRelation.EQUAL and b < a:
                a, b = b, a
            example = PointExample(doc_id, a, b, relation, Provenance.CLOSURE)
            key = example.fact_key()
            # A derived edge that restates an input fact (in either
            # direction) is not a new example.
            if key in known or example.inverted().fact_key() in known:
                continue
            known.add(key)
            out.append(example)
    return out


def rebalance_lt_gt(examples: Sequence[PointExample], seed: int) -> list[PointExample]:
    """Flip half (rounded down) of the closure-derived < examples into >.

    The flip swaps endpoints and inverts the relation, so the underlying
    fact set is unchanged. Selection is a seeded uniform choice.
    """
    candidates = [
        i for i, ex in enumerate(examples)
        if ex.provenance is Provenance.CLOSURE and ex.relation is PointRelation.BEFORE
    ]
    rng = random.Random(seed)
    to_flip = set(rng.sample(candidates, len(candidates) // 2))
    return [
        ex.inverted() if i in to_flip else ex
        for i, ex in enumerate(examples)
    ]


def interval_closure_augment(examples: Sequence[IntervalExample]) -> list[IntervalExample]:
    """Interval-level analogue of closure augmentation."""
    by_doc: dict[str, list[IntervalExample]] = {}
    for ex in examples:
        by_doc.setdefault(ex.doc_id, []).append(ex)
    out = list(examples)
    for doc_id in sorted(by_doc):
        known = {
            IntervalAssertion(ex.source, ex.relation, ex.target).canonical()
            for ex in by_doc[doc_id]
        }
        try:
            closed = interval_closure(known)
        except InconsistencyError as exc:
            log.warning("%s: inconsistent annotations, skipping interval closure (%s)", doc_id, exc)
            continue
        for assertion in sorted(closed, key=lambda a: (a.source, a.target, a.relation.value)):
            if assertion in known:
                continue
            out.append(
                IntervalExample(
                    doc_id, assertion.source, assertion.target,
                    assertion.relation, Provenance.CLOSURE,
                )
            )
    return out


def build_training_sets(
    docs: Sequence[Document], rebalance_seed: int = 0
) -> tuple[dict[str, list[PointExample]], dict[str, list[IntervalExample]]]:
    """Materialize the four point and four interval training sets.

    Keys: "raw", "inverse", "closure", "inverse-closure".
    """
    raw = intervals_to_points(docs)
    inverse = augment_inverse(raw)
    closure = augment_inverse(
        rebalance_lt_gt(augment_closure(docs, raw), seed=rebalance_seed)
    )
    inverse_closure = augment_inverse(closure)
    point_sets = {
        "raw": raw,
        "inverse": inverse,
        "closure": closure,
        "inverse-closure": inverse_closure,
    }

    interval_raw = [
        IntervalExample(doc.id, l.source, l.target, l.relation, Provenance.ANNOTATED)
        for doc in docs
        for l in doc.tlinks
    ]
    interval_closed = interval_closure_augment(interval_raw)
    interval_sets = {
        "raw": interval_raw,
        "inverse": augment_inverse(interval_raw),
        "closure": augment_inverse(interval_closed),
        "inverse-closure": augment_inverse(augment_inverse(interval_closed)),
    }
    return point_sets, interval_sets


def dataset_stats(examples: Sequence[PointExample]) -> dict[tuple[EndpointPairKey, PointRelation], int]:
    """Occurrence counts keyed by (endpoint pair, relation)."""
    counts: Counter = Counter()
    for ex in examples:
        counts[(ex.pair_key, ex.relation)] += 1
    return dict(counts)


def interval_stats(examples: Sequence[IntervalExample]) -> dict[AllenRelation, int]:
    counts: Counter = Counter()
    for ex in examples:
        counts[ex.relation] += 1
    return dict(counts)


def stats_table(examples: Sequence[PointExample]) -> dict[str, dict[str, int]]:
    """JSON-friendly count table, all cells present."""
    counts = dataset_stats(examples)
    return {
        key.value: {
            rel.value: counts.get((key, rel), 0) for rel in PointRelation
        }
        for key in EndpointPairKey
    }


# ---------------------------------------------------------------------------
# File formats: line-delimited JSON records, UTF-8, plus a stats sidecar.

def write_point_dataset(path: Path | str, examples: Sequence[PointExample]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps({
                "doc_id": ex.doc_id,
                "source_entity": ex.source.entity_id,
                "source_side": ex.source.side.value,
                "target_entity": ex.target.entity_id,
                "target_side": ex.target.side.value,
                "relation": ex.relation.value,
                "provenance": ex.provenance.value,
            }, sort_keys=True) + "\n")
    sidecar = path.with_suffix(path.suffix + ".stats.json")
    sidecar.write_text(json.dumps(stats_table(examples), indent=2, sort_keys=True) + "\n")


def read_point_dataset(path: Path | str) -> list[PointExample]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(PointExample(
            rec["doc_id"],
            PointEndpoint(rec["source_entity"], Side(rec["source_side"])),
            PointEndpoint(rec["target_entity"], Side(rec["target_side"])),
            PointRelation(rec["relation"]),
            Provenance(rec["provenance"]),
        ))
    return out


def write_interval_dataset(path: Path | str, examples: Sequence[IntervalExample]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps({
                "doc_id": ex.doc_id,
                "source_entity": ex.source,
                "target_entity": ex.target,
                "relation": ex.relation.value,
                "provenance": ex.provenance.value,
            }, sort_keys=True) + "\n")
    counts = interval_stats(examples)
    sidecar = path.with_suffix(path.suffix + ".stats.json")
    sidecar.write_text(json.dumps(
        {rel.value: counts.get(rel, 0) for rel in AllenRelation},
        indent=2, sort_keys=True,
    ) + "\n")


def read_interval_dataset(path: Path | str) -> list[IntervalExample]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(IntervalExample(
            rec["doc_id"],
            rec["source_entity"],
            rec["target_entity"],
            AllenRelation(rec["relation"]),
            Provenance(rec["provenance"]),
        ))
    return out
