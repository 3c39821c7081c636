"""Neural point-relation classifier over tagged temporal queries.

Reads tagged-query files and point/interval dataset files, trains a small
classifier over marked endpoint pairs, and writes probability files that a
file-backed decoder can consume. The only coupling to the companion
toolkit is those line-delimited JSON formats.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    MissingSpecialToken,
    ModelConfig,
    PointRelationModel,
    VocabularyMismatch,
)
