"""Decoding point-relation probabilities into interval relations.

Forward and swapped predictions for an endpoint pair are combined through
the anti-diagonal product; candidate interval relations are scored by the
product of the point probabilities in their decomposition, and the argmax
is the prediction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .algebra import (
    AllenRelation,
    EndpointPairKey,
    PAIR_KEYS,
    PointEndpoint,
    PointRelation,
    Side,
    interval_to_points,
)
from .corpus import Document
from .encoding import Direction, TaggedQuery, tag_point_pair

PROB_FLOOR = 1e-9

# The eleven interval labels that actually occur after TimeML mapping
# (overlaps and overlapped-by are unused by the annotation scheme).
OBSERVED_RELATIONS = tuple(
    r for r in AllenRelation
    if r not in (AllenRelation.OVERLAPS, AllenRelation.OVERLAPPED_BY)
)
ALL_RELATIONS = tuple(AllenRelation)


class DegenerateScores(Exception):
    pass


class MissingPrediction(Exception):
    pass


@dataclass(frozen=True)
class PointDistribution:
    p_before: float
    p_equal: float
    p_after: float

    def __post_init__(self):
        if min(self.p_before, self.p_equal, self.p_after) < 0:
            raise ValueError("probabilities must be non-negative")

    def __getitem__(self, relation: PointRelation) -> float:
        return {
            PointRelation.BEFORE: self.p_before,
            PointRelation.EQUAL: self.p_equal,
            PointRelation.AFTER: self.p_after,
        }[relation]

    def reverse(self) -> "PointDistribution":
        """Anti-diagonal reordering: the distribution of the swapped pair."""
        return PointDistribution(self.p_after, self.p_equal, self.p_before)

    def floored(self, eps: float = PROB_FLOOR) -> "PointDistribution":
        return PointDistribution(
            max(self.p_before, eps), max(self.p_equal, eps), max(self.p_after, eps)
        )

    def normalized(self) -> "PointDistribution":
        total = self.p_before + self.p_equal + self.p_after
        if total <= 0:
            raise DegenerateScores("cannot normalize an all-zero distribution")
        return PointDistribution(self.p_before / total, self.p_equal / total, self.p_after / total)

    def argmax(self) -> PointRelation:
        best = PointRelation.BEFORE
        for rel in (PointRelation.EQUAL, PointRelation.AFTER):
            if self[rel] > self[best]:
                best = rel
        return best

    @staticmethod
    def one_hot(relation: PointRelation) -> "PointDistribution":
        return PointDistribution(
            1.0 if relation is PointRelation.BEFORE else 0.0,
            1.0 if relation is PointRelation.EQUAL else 0.0,
            1.0 if relation is PointRelation.AFTER else 0.0,
        )

    @staticmethod
    def uniform() -> "PointDistribution":
        return PointDistribution(1 / 3, 1 / 3, 1 / 3)


QuadDistribution = dict[EndpointPairKey, PointDistribution]


def one_hot_quad(relation: AllenRelation) -> QuadDistribution:
    quad = interval_to_points(relation)
    return dict(zip(PAIR_KEYS, (PointDistribution.one_hot(r) for r in quad)))


def combine_symmetric(forward: PointDistribution, swapped: PointDistribution) -> PointDistribution:
    """Elementwise product of the forward estimate with the reversed swapped
    estimate. Unnormalized by design: normalization cannot move the argmax.
    """
    rev = swapped.reverse()
    return PointDistribution(
        forward.p_before * rev.p_before,
        forward.p_equal * rev.p_equal,
        forward.p_after * rev.p_after,
    )


def score_intervals(
    quad: QuadDistribution, relation_set: Sequence[AllenRelation] = ALL_RELATIONS
) -> dict[AllenRelation, float]:
    """Score each candidate relation by the product of its point probabilities.

    Each factor is floored at a tiny epsilon so one hard zero cannot
    annihilate every candidate.
    """
    if not relation_set:
        raise ValueError("relation_set must be non-empty")
    floored = {key: quad[key].floored() for key in PAIR_KEYS}
    scores: dict[AllenRelation, float] = {}
    for relation in relation_set:
        decomposition = interval_to_points(relation)
        score = 1.0
        for key, point_rel in zip(PAIR_KEYS, decomposition):
            score *= floored[key][point_rel]
        scores[relation] = score
    return scores


@dataclass(frozen=True)
class DecodedPrediction:
    relation: AllenRelation
    scores: Mapping[AllenRelation, float]
    quad: QuadDistribution


_CANONICAL_ORDER = {r: i for i, r in enumerate(AllenRelation)}


def decode(
    quad: QuadDistribution, relation_set: Sequence[AllenRelation] = ALL_RELATIONS
) -> DecodedPrediction:
    """Argmax over interval scores; ties break by canonical relation order."""
    scores = score_intervals(quad, relation_set)
    if all(s == 0.0 for s in scores.values()):
        raise DegenerateScores("all interval scores are zero")
    best = min(scores, key=lambda r: (-scores[r], _CANONICAL_ORDER[r]))
    return DecodedPrediction(best, scores, dict(quad))


class Predictor:
    """Maps a tagged query to a point-relation distribution.

    Subclasses must be deterministic for a fixed state and query; batching
    is opt-in via `predict_batch`.
    """

    concurrent_safe = True

    def predict(self, query: TaggedQuery) -> PointDistribution:
        raise NotImplementedError

    def predict_batch(self, queries: Sequence[TaggedQuery]) -> list[PointDistribution]:
        return [self.predict(q) for q in queries]


def classify_pair(
    doc: Document,
    x_id: str,
    y_id: str,
    predictor: Predictor,
    relation_set: Sequence[AllenRelation] = ALL_RELATIONS,
) -> DecodedPrediction:
    """Full inference for one entity pair: 8 queries, combine, decode."""
    queries: list[TaggedQuery] = []
    for x_side in (Side.START, Side.END):
        for y_side in (Side.START, Side.END):
            x = PointEndpoint(x_id, x_side)
            y = PointEndpoint(y_id, y_side)
            queries.append(tag_point_pair(doc, x, y, Direction.FORWARD))
            queries.append(tag_point_pair(doc, x, y, Direction.SWAPPED))
    try:
        distributions = predictor.predict_batch(queries)
    except MissingPrediction:
        raise
    except Exception as exc:
        raise type(exc)(f"predictor failed on queries for ({x_id}, {y_id}): {exc}") from exc
    quad: QuadDistribution = {}
    for key, i in zip(PAIR_KEYS, range(0, 8, 2)):
        quad[key] = combine_symmetric(distributions[i], distributions[i + 1])
    return decode(quad, relation_set)


# ---------------------------------------------------------------------------
# Built-in predictors.

def _parse_query_id(query_id: str) -> tuple[str, PointEndpoint, PointEndpoint, Direction]:
    doc_id, x_str, y_str, direction = query_id.rsplit("|", 3)

    def endpoint(s: str) -> PointEndpoint:
        ent, side = s.rsplit(".", 1)
        return PointEndpoint(ent, Side(side))

    return doc_id, endpoint(x_str), endpoint(y_str), Direction(direction)


class ConstantPredictor(Predictor):
    """Always predicts one point relation; `<` realizes the majority system."""

    def __init__(self, relation: PointRelation = PointRelation.BEFORE):
        self.relation = relation

    def predict(self, query: TaggedQuery) -> PointDistribution:
        return PointDistribution.one_hot(self.relation)


class PriorPredictor(Predictor):
    """Emits the training-set point-label frequencies for the queried pair key."""

    def __init__(self, counts: Mapping[tuple[EndpointPairKey, PointRelation], int]):
        self.distributions: dict[EndpointPairKey, PointDistribution] = {}
        for key in PAIR_KEYS:
            row = [counts.get((key, rel), 0) for rel in PointRelation]
            total = sum(row) or 1
            self.distributions[key] = PointDistribution(*(c / total for c in row))

    def predict(self, query: TaggedQuery) -> PointDistribution:
        _, x, y, direction = _parse_query_id(query.query_id)
        if direction is Direction.SWAPPED:
            # The swapped query reads (y_j REL x_i); its pair key comes from
            # the swapped sides.
            key = EndpointPairKey(y.side.value + x.side.value)
        else:
            key = EndpointPairKey(x.side.value + y.side.value)
        return self.distributions[key]


class RandomPredictor(Predictor):
    """Seeded random distributions, stable per query id."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def predict(self, query: TaggedQuery) -> PointDistribution:
        import hashlib
        import random as _random

        digest = hashlib.sha256(f"{self.seed}|{query.query_id}".encode()).digest()
        rng = _random.Random(int.from_bytes(digest[:8], "big"))
        raw = [rng.random() for _ in range(3)]
        total = sum(raw)
        return PointDistribution(*(v / total for v in raw))


class GoldOraclePredictor(Predictor):
    """One-hot gold point relations, with optional symmetric label-flip noise.

    Gold point facts are taken from each document's annotated links (closed
    over composition where the annotations are consistent, so derived pairs
    are answerable too); pairs with no gold fact get a uniform distribution.
    """

    def __init__(self, docs: Iterable[Document], noise: float = 0.0, seed: int = 0):
        from .algebra import InconsistencyError, graph_from_assertions, point_closure

        if not 0.0 <= noise <= 1.0:
            raise ValueError("noise must be in [0, 1]")
        self.noise = noise
        self.seed = seed
        self._facts: dict[str, dict[tuple[PointEndpoint, PointEndpoint], PointRelation]] = {}
        for doc in docs:
            graph = graph_from_assertions(l.assertion() for l in doc.tlinks)
            try:
                graph = point_closure(graph)
            except InconsistencyError:
                pass  # fall back to the raw annotation graph
            facts: dict[tuple[PointEndpoint, PointEndpoint], PointRelation] = {}
            for a, rel, b in graph.edge_items():
                facts[(a, b)] = rel
                facts[(b, a)] = rel.invert()
            self._facts[doc.id] = facts

    def predict(self, query: TaggedQuery) -> PointDistribution:
        doc_id, x, y, direction = _parse_query_id(query.query_id)
        if direction is Direction.SWAPPED:
            x, y = y, x
        relation = self._facts.get(doc_id, {}).get((x, y))
        if relation is None:
            return PointDistribution.uniform()
        if self.noise > 0.0:
            import hashlib
            import random as _random

            digest = hashlib.sha256(f"{self.seed}|{query.query_id}".encode()).digest()
            rng = _random.Random(int.from_bytes(digest[:8], "big"))
            if rng.random() < self.noise:
                relation = rng.choice([r for r in PointRelation if r is not relation])
        return PointDistribution.one_hot(relation)


class FilePredictor(Predictor):
    """Line-delimited {query_id, p_before, p_equal, p_after} records."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self._table: dict[str, PointDistribution] = {}
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            self._table[rec["query_id"]] = PointDistribution(
                rec["p_before"], rec["p_equal"], rec["p_after"]
            )

    def predict(self, query: TaggedQuery) -> PointDistribution:
        try:
            return self._table[query.query_id]
        except KeyError:
            raise MissingPrediction(f"{self.path} has no record for {query.query_id}") from None

    def __len__(self) -> int:
        return len(self._table)
