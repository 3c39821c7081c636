"""A small classifier over tagged endpoint (or interval) queries.

Tokens are whitespace-split; the marker tags are dedicated vocabulary
entries and every other token is hash-bucketed. A query's feature vector
concatenates the contextual embeddings of its four marker tokens, in
document order, with the mean over all token embeddings — dimension 5m for
embedding width m. A two-layer head maps that to a probability simplex
over the 3 point relations or the 11 interval relations.
"""

from __future__ import annotations

import hashlib

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import torch
from torch import nn

from .data import INTERVAL_LABELS, POINT_LABELS, Query

POINT_BOUNDARY_TOKENS = ("<xs>", "</xs>", "<xe>", "</xe>", "<ys>", "</ys>", "<ye>", "</ye>")
INTERVAL_BOUNDARY_TOKENS = ("<x>", "</x>", "<y>", "</y>")
DCT_TOKEN = "<dct>"


class MissingSpecialToken(Exception):
    """A query does not contain exactly four marker tokens."""


class VocabularyMismatch(Exception):
    """A query uses marker tokens outside the model's tag family."""


@dataclass(frozen=True)
class ModelConfig:
    level: str = "point"  # "point" or "interval"
    hidden_size: int = 32
    vocab_buckets: int = 2048
    max_chars: int = 2000
    # Training hyperparameters.
    learning_rate: float = 3e-4
    weight_decay: float = 0.01
    epochs: int = 10
    batch_size: int = 32
    max_grad_norm: float = 1.0
    label_smoothing: float = 0.05
    warmup_fraction: float = 0.02
    eval_every: int = 2000
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.level not in ("point", "interval"):
            raise ValueError(f"unknown level {self.level!r}")
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be positive")

    @property
    def boundary_tokens(self) -> tuple[str, ...]:
        return POINT_BOUNDARY_TOKENS if self.level == "point" else INTERVAL_BOUNDARY_TOKENS

    @property
    def special_tokens(self) -> tuple[str, ...]:
        return self.boundary_tokens + (DCT_TOKEN,)

    @property
    def labels(self) -> tuple[str, ...]:
        return POINT_LABELS if self.level == "point" else INTERVAL_LABELS

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def feature_dim(self) -> int:
        return 5 * self.hidden_size


_FOREIGN_TOKENS = set(POINT_BOUNDARY_TOKENS) | set(INTERVAL_BOUNDARY_TOKENS)


class Tokenizer:
    """Whitespace tokens; marker tags get fixed ids, words get hash buckets."""

    PAD_ID = 0

    def __init__(self, config: ModelConfig):
        self.config = config
        self.special_ids = {tok: i + 1 for i, tok in enumerate(config.special_tokens)}
        self.word_base = 1 + len(self.special_ids)

    @property
    def vocab_size(self) -> int:
        return self.word_base + self.config.vocab_buckets

    def _bucket(self, word: str) -> int:
        digest = hashlib.sha256(word.encode("utf-8")).digest()
        return self.word_base + int.from_bytes(digest[:8], "big") % self.config.vocab_buckets

    def encode(self, text: str) -> list[int]:
        if len(text) > self.config.max_chars:
            text = text[: self.config.max_chars]
        # Tags can abut punctuation in the source text ("</ye>."); isolate
        # every known tag so whitespace splitting always yields it whole.
        for tag in list(self.special_ids) + sorted(_FOREIGN_TOKENS):
            text = text.replace(tag, f" {tag} ")
        ids = []
        for word in text.split():
            if word in self.special_ids:
                ids.append(self.special_ids[word])
            elif word in _FOREIGN_TOKENS:
                raise VocabularyMismatch(
                    f"token {word!r} does not belong to the {self.config.level}-level tag set"
                )
            else:
                ids.append(self._bucket(word))
        return ids


class PointRelationModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.tokenizer = Tokenizer(config)
        m = config.hidden_size
        self.embedding = nn.Embedding(self.tokenizer.vocab_size, m, padding_idx=Tokenizer.PAD_ID)
        self.context = nn.GRU(m, m, batch_first=True)
        self.head = nn.Sequential(
            nn.Linear(config.feature_dim, config.feature_dim),
            nn.ReLU(),
            nn.Linear(config.feature_dim, config.n_labels),
        )
        self._init_special_embeddings()

    @property
    def feature_dim(self) -> int:
        return self.config.feature_dim

    def _init_special_embeddings(self) -> None:
        # Marker tokens start at the mean word embedding plus small noise so
        # they are typical inputs before any training.
        with torch.no_grad():
            words = self.embedding.weight[self.tokenizer.word_base:]
            mean = words.mean(dim=0)
            for token_id in self.tokenizer.special_ids.values():
                noise = torch.randn_like(mean) * 0.01
                self.embedding.weight[token_id] = mean + noise

    def _boundary_positions(self, ids: Sequence[int]) -> list[int]:
        boundary_ids = {
            self.tokenizer.special_ids[tok] for tok in self.config.boundary_tokens
        }
        positions = [i for i, t in enumerate(ids) if t in boundary_ids]
        if len(positions) != 4:
            raise MissingSpecialToken(
                f"expected exactly 4 marker tokens, found {len(positions)}"
            )
        return positions

    def embed_and_pool(self, token_ids: Sequence[int]) -> torch.Tensor:
        """Feature vector (dimension 5m) for one tokenized query."""
        positions = self._boundary_positions(token_ids)
        ids = torch.tensor([list(token_ids)], dtype=torch.long)
        embedded = self.embedding(ids)
        contextual, _ = self.context(embedded)
        marks = contextual[0, positions, :].reshape(-1)
        avg = contextual[0].mean(dim=0)
        return torch.cat([marks, avg])

    def head_forward(self, features: torch.Tensor) -> torch.Tensor:
        """Probability simplex over the labels; accepts (5m,) or (B, 5m)."""
        logits = self.head(features)
        return torch.softmax(logits, dim=-1)

    def _batch_features(self, texts: Sequence[str]) -> torch.Tensor:
        features = []
        for text in texts:
            features.append(self.embed_and_pool(self.tokenizer.encode(text)))
        return torch.stack(features)

    def forward(self, texts: Sequence[str]) -> torch.Tensor:
        """Logits for a batch of query texts."""
        return self.head(self._batch_features(texts))

    def predict_probabilities(self, texts: Sequence[str], batch_size: int = 64) -> torch.Tensor:
        self.eval()
        rows = []
        with torch.no_grad():
            for start in range(0, len(texts), batch_size):
                chunk = texts[start:start + batch_size]
                rows.append(torch.softmax(self.forward(chunk), dim=-1))
        return torch.cat(rows) if rows else torch.empty(0, self.config.n_labels)

    def predict_queries(self, queries: Iterable[Query], batch_size: int = 64) -> list[dict]:
        """One probability record per query, in the decoder's file format."""
        queries = list(queries)
        probs = self.predict_probabilities([q.text for q in queries], batch_size)
        records = []
        for query, row in zip(queries, probs):
            if self.config.level == "point":
                records.append({
                    "query_id": query.query_id,
                    "p_before": float(row[0]),
                    "p_equal": float(row[1]),
                    "p_after": float(row[2]),
                })
            else:
                doc_id, x, y, _ = query.query_id.rsplit("|", 3)
                scores = {label: float(p) for label, p in zip(self.config.labels, row)}
                records.append({
                    "doc_id": doc_id,
                    "source": x,
                    "target": y,
                    "predicted_relation": max(scores, key=scores.get),
                    "scores": scores,
                })
        return records

    def save(self, path: Path | str) -> None:
        torch.save({"config": asdict(self.config), "state_dict": self.state_dict()}, path)

    @classmethod
    def load(cls, path: Path | str) -> "PointRelationModel":
        payload = torch.load(path, map_location="cpu", weights_only=True)
        model = cls(ModelConfig(**payload["config"]))
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return model
