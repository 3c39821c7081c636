"""Interval and point relation algebra.

Allen's 13 interval relations, their decomposition into the three point
relations {<, =, >} over the four endpoint pairs, composition of point
relations, and per-document closure / reduction of relation graphs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional


class InconsistencyError(Exception):
    """A relation graph entails contradictory facts.

    Carries the offending endpoint (or entity) pair when known.
    """

    def __init__(self, message: str, pair: tuple = ()):  # noqa: D401
        super().__init__(message)
        self.pair = pair


class PointRelation(enum.Enum):
    BEFORE = "<"
    EQUAL = "="
    AFTER = ">"

    def invert(self) -> "PointRelation":
        if self is PointRelation.BEFORE:
            return PointRelation.AFTER
        if self is PointRelation.AFTER:
            return PointRelation.BEFORE
        return PointRelation.EQUAL

    def __str__(self) -> str:
        return self.value


class AllenRelation(enum.Enum):
    # Declaration order is the canonical order used for tie-breaking.
    BEFORE = "before"
    AFTER = "after"
    MEETS = "meets"
    MET_BY = "met-by"
    OVERLAPS = "overlaps"
    OVERLAPPED_BY = "overlapped-by"
    STARTS = "starts"
    STARTED_BY = "started-by"
    FINISHES = "finishes"
    FINISHED_BY = "finished-by"
    CONTAINS = "contains"
    DURING = "during"
    EQUALS = "equals"

    def __str__(self) -> str:
        return self.value


class EndpointPairKey(enum.Enum):
    """Which endpoint pair a point relation refers to, in fixed order."""

    SS = "ss"
    SE = "se"
    ES = "es"
    EE = "ee"

    def __str__(self) -> str:
        return self.value


PAIR_KEYS = (
    EndpointPairKey.SS,
    EndpointPairKey.SE,
    EndpointPairKey.ES,
    EndpointPairKey.EE,
)


class Side(str, enum.Enum):
    START = "s"
    END = "e"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class PointEndpoint:
    entity_id: str
    side: Side

    def __post_init__(self):
        if not self.entity_id:
            raise ValueError("entity_id must be non-empty")

    def __str__(self) -> str:
        return f"{self.entity_id}.{self.side.value}"


@dataclass(frozen=True)
class PointStatement:
    source: PointEndpoint
    relation: PointRelation
    target: PointEndpoint

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("point statement must relate distinct endpoints")

    def inverted(self) -> "PointStatement":
        return PointStatement(self.target, self.relation.invert(), self.source)


Quad = tuple[PointRelation, PointRelation, PointRelation, PointRelation]

_LT = PointRelation.BEFORE
_EQ = PointRelation.EQUAL
_GT = PointRelation.AFTER

# Point decomposition of each interval relation, in (ss, se, es, ee) order.
# Intervals are strict: x_s < x_e and y_s < y_e are presumed throughout.
_DECOMPOSITION: dict[AllenRelation, Quad] = {
    AllenRelation.BEFORE: (_LT, _LT, _LT, _LT),
    AllenRelation.AFTER: (_GT, _GT, _GT, _GT),
    AllenRelation.MEETS: (_LT, _LT, _EQ, _LT),
    AllenRelation.MET_BY: (_GT, _EQ, _GT, _GT),
    AllenRelation.OVERLAPS: (_LT, _LT, _GT, _LT),
    AllenRelation.OVERLAPPED_BY: (_GT, _LT, _GT, _GT),
    AllenRelation.STARTS: (_EQ, _LT, _GT, _LT),
    AllenRelation.STARTED_BY: (_EQ, _LT, _GT, _GT),
    AllenRelation.FINISHES: (_GT, _LT, _GT, _EQ),
    AllenRelation.FINISHED_BY: (_LT, _LT, _GT, _EQ),
    AllenRelation.CONTAINS: (_LT, _LT, _GT, _GT),
    AllenRelation.DURING: (_GT, _LT, _GT, _LT),
    AllenRelation.EQUALS: (_EQ, _LT, _GT, _EQ),
}

_DECOMPOSITION_INVERSE: dict[Quad, AllenRelation] = {
    q: r for r, q in _DECOMPOSITION.items()
}


def interval_to_points(relation: AllenRelation) -> Quad:
    """Decompose an interval relation into its four point relations.

    The tuple is indexed in the canonical (ss, se, es, ee) order.
    """
    return _DECOMPOSITION[relation]


def points_to_interval(quad: Quad) -> Optional[AllenRelation]:
    """Inverse decomposition lookup; None when no interval relation matches."""
    return _DECOMPOSITION_INVERSE.get(tuple(quad))


def _derive_inverse(relation: AllenRelation) -> AllenRelation:
    # Inverting swaps the roles of x and y: the relation between (y, x) has
    # quad (inv(ss), inv(es), inv(se), inv(ee)) of the original (ss, se, es, ee).
    ss, se, es, ee = _DECOMPOSITION[relation]
    swapped = (ss.invert(), es.invert(), se.invert(), ee.invert())
    inverse = _DECOMPOSITION_INVERSE[swapped]
    return inverse


_INTERVAL_INVERSE: dict[AllenRelation, AllenRelation] = {
    r: _derive_inverse(r) for r in AllenRelation
}


def invert_interval(relation: AllenRelation) -> AllenRelation:
    """The relation holding between (y, x) when `relation` holds between (x, y)."""
    return _INTERVAL_INVERSE[relation]


_COMPOSITION: dict[tuple[PointRelation, PointRelation], Optional[PointRelation]] = {
    (_LT, _LT): _LT,
    (_LT, _EQ): _LT,
    (_EQ, _LT): _LT,
    (_EQ, _EQ): _EQ,
    (_GT, _GT): _GT,
    (_GT, _EQ): _GT,
    (_EQ, _GT): _GT,
    (_LT, _GT): None,
    (_GT, _LT): None,
}


def compose_points(r1: PointRelation, r2: PointRelation) -> Optional[PointRelation]:
    """Definite composition of point relations, or None when indeterminate."""
    return _COMPOSITION[(r1, r2)]


class PointGraph:
    """Definite point relations over a set of endpoints.

    Each unordered endpoint pair is stored once, keyed by the smaller
    endpoint under the total (entity_id, side) order; the symmetric edge is
    derived by inversion on lookup.
    """

    def __init__(self, statements: Iterable[PointStatement] = ()):
        self._points: set[PointEndpoint] = set()
        self._edges: dict[tuple[PointEndpoint, PointEndpoint], PointRelation] = {}
        for st in statements:
            self.add(st.source, st.relation, st.target)

    @property
    def points(self) -> frozenset[PointEndpoint]:
        return frozenset(self._points)

    def add(self, a: PointEndpoint, relation: PointRelation, b: PointEndpoint) -> None:
        if a == b:
            if relation is not PointRelation.EQUAL:
                raise InconsistencyError(f"{a} {relation} {a} is self-contradictory", (a, a))
            return
        self._points.add(a)
        self._points.add(b)
        if b < a:
            a, b, relation = b, a, relation.invert()
        existing = self._edges.get((a, b))
        if existing is not None and existing is not relation:
            raise InconsistencyError(
                f"conflicting relations for ({a}, {b}): {existing} vs {relation}",
                (a, b),
            )
        self._edges[(a, b)] = relation

    def get(self, a: PointEndpoint, b: PointEndpoint) -> Optional[PointRelation]:
        if a == b:
            return PointRelation.EQUAL
        if b < a:
            rel = self._edges.get((b, a))
            return rel.invert() if rel is not None else None
        return self._edges.get((a, b))

    def statements(self) -> set[PointStatement]:
        """One canonical statement per stored edge."""
        return {PointStatement(a, r, b) for (a, b), r in self._edges.items()}

    def edge_items(self) -> list[tuple[PointEndpoint, PointRelation, PointEndpoint]]:
        return [(a, r, b) for (a, b), r in self._edges.items()]

    def copy(self) -> "PointGraph":
        g = PointGraph()
        g._points = set(self._points)
        g._edges = dict(self._edges)
        return g

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, PointGraph) and self._edges == other._edges

    def __repr__(self) -> str:
        return f"PointGraph({len(self._points)} points, {len(self._edges)} edges)"


def point_closure(graph: PointGraph) -> PointGraph:
    """Least fixed point of `graph` under composition and symmetry.

    Semi-naive fixpoint: newly derived edges are composed against all known
    edges until nothing new appears. Raises InconsistencyError when a
    contradiction is derived.
    """
    closed = graph.copy()
    # Adjacency over both directions so 2-paths through any midpoint are seen.
    adj: dict[PointEndpoint, dict[PointEndpoint, PointRelation]] = {}

    def record(a: PointEndpoint, r: PointRelation, b: PointEndpoint) -> None:
        adj.setdefault(a, {})[b] = r
        adj.setdefault(b, {})[a] = r.invert()

    frontier: list[tuple[PointEndpoint, PointRelation, PointEndpoint]] = []
    for a, r, b in closed.edge_items():
        record(a, r, b)
        frontier.append((a, r, b))

    while frontier:
        a, r_ab, b = frontier.pop()
        # Compose (a, r_ab, b) with every edge leaving b, and every edge
        # arriving at a (i.e. leaving a, inverted composition handled by
        # symmetry of `record`).
        for mid, via, other_end in ((b, r_ab, a), (a, r_ab.invert(), b)):
            for c, r_mc in list(adj.get(mid, {}).items()):
                if c == other_end:
                    continue
                derived = compose_points(via, r_mc)
                if derived is None:
                    continue
                src = a if mid is b else b
                # src -> mid holds `via`; mid -> c holds r_mc.
                known = closed.get(src, c)
                if known is derived:
                    continue
                closed.add(src, derived, c)  # raises on contradiction
                record(src, derived, c)
                frontier.append((src, derived, c))
    return closed


@dataclass(frozen=True)
class IntervalAssertion:
    """A definite interval relation between two entities of one document."""

    source: str
    relation: AllenRelation
    target: str

    def inverted(self) -> "IntervalAssertion":
        return IntervalAssertion(self.target, invert_interval(self.relation), self.source)

    def canonical(self) -> "IntervalAssertion":
        """Orient so source <= target under string order (equal ids invalid)."""
        if self.target < self.source:
            return self.inverted()
        return self


def _endpoint(entity: str, side: Side) -> PointEndpoint:
    return PointEndpoint(entity, side)


def graph_from_assertions(
    assertions: Iterable[IntervalAssertion], strict_intervals: bool = True
) -> PointGraph:
    """Translate interval assertions into a point graph.

    Injects the x_s < x_e constraint for every mentioned entity when
    `strict_intervals` (the default; Allen's relations presume non-degenerate
    intervals).
    """
    graph = PointGraph()
    entities: set[str] = set()
    for assertion in assertions:
        entities.add(assertion.source)
        entities.add(assertion.target)
        quad = interval_to_points(assertion.relation)
        pairs = (
            (Side.START, Side.START),
            (Side.START, Side.END),
            (Side.END, Side.START),
            (Side.END, Side.END),
        )
        for (x_side, y_side), rel in zip(pairs, quad):
            graph.add(
                _endpoint(assertion.source, x_side),
                rel,
                _endpoint(assertion.target, y_side),
            )
    if strict_intervals:
        for entity in entities:
            graph.add(
                _endpoint(entity, Side.START),
                PointRelation.BEFORE,
                _endpoint(entity, Side.END),
            )
    return graph


def assertions_from_graph(graph: PointGraph) -> set[IntervalAssertion]:
    """Read back every fully determined interval relation from a point graph.

    An entity pair yields an assertion when all four endpoint relations are
    present and form a valid decomposition row. Output is canonicalized.
    """
    entities = sorted({p.entity_id for p in graph.points})
    out: set[IntervalAssertion] = set()
    for i, x in enumerate(entities):
        for y in entities[i + 1:]:
            quad = (
                graph.get(_endpoint(x, Side.START), _endpoint(y, Side.START)),
                graph.get(_endpoint(x, Side.START), _endpoint(y, Side.END)),
                graph.get(_endpoint(x, Side.END), _endpoint(y, Side.START)),
                graph.get(_endpoint(x, Side.END), _endpoint(y, Side.END)),
            )
            if any(r is None for r in quad):
                continue
            relation = points_to_interval(quad)  # type: ignore[arg-type]
            if relation is not None:
                out.add(IntervalAssertion(x, relation, y))
    return out


def interval_closure(assertions: Iterable[IntervalAssertion]) -> set[IntervalAssertion]:
    """All interval relations entailed by `assertions`, via point closure.

    Raises InconsistencyError when the assertions are unsatisfiable.
    """
    assertions = list(assertions)
    graph = point_closure(graph_from_assertions(assertions))
    closed = assertions_from_graph(graph)
    # Canonicalization may flip input direction; the closed set always
    # contains each input fact in canonical orientation.
    return closed


def entails(closed: set[IntervalAssertion], assertion: IntervalAssertion) -> bool:
    """Membership modulo inversion canonicalization."""
    return assertion.canonical() in closed


def transitive_reduction(assertions: Iterable[IntervalAssertion]) -> set[IntervalAssertion]:
    """A minimal subset with the same interval closure.

    Candidates are dropped greedily in sorted (source, target, relation)
    order, so the result is deterministic. Raises InconsistencyError on
    inconsistent input.
    """
    kept = sorted(
        {a.canonical() for a in assertions},
        key=lambda a: (a.source, a.target, a.relation.value),
    )
    target_closure = interval_closure(kept)
    for assertion in list(kept):
        trial = [a for a in kept if a != assertion]
        if interval_closure(trial) == target_closure:
            kept = trial
    return set(kept)
