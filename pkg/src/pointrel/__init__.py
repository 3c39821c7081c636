"""Point-relation toolkit for fine-grained temporal relation classification.

Converts interval-annotated corpora into endpoint-pair datasets, augments
them by inversion and temporal closure, decodes point-relation probability
distributions into interval relations, and scores predictions with
closure-aware metrics.
"""

__version__ = "0.1.0"

from .algebra import (  # noqa: F401
    AllenRelation,
    EndpointPairKey,
    InconsistencyError,
    IntervalAssertion,
    PointEndpoint,
    PointGraph,
    PointRelation,
    PointStatement,
    Side,
    compose_points,
    interval_closure,
    interval_to_points,
    invert_interval,
    point_closure,
    points_to_interval,
    transitive_reduction,
)
