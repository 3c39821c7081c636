"""Training loop: AdamW, cosine schedule with warmup, smoothed cross-entropy,
periodic validation with early stopping on macro-F1."""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import torch
from torch import nn

from .data import (
    DataFormatError,
    Query,
    interval_label_for_query,
    point_label_for_query,
)
from .model import ModelConfig, PointRelationModel

log = logging.getLogger(__name__)


@dataclass
class LabeledExample:
    text: str
    label: int


@dataclass
class TrainResult:
    model: PointRelationModel
    loss_curve: list[float] = field(default_factory=list)
    eval_curve: list[tuple[int, float]] = field(default_factory=list)
    best_val_f1: float = 0.0
    steps: int = 0


def join_labels(queries: Sequence[Query], labels: dict, level: str) -> list[LabeledExample]:
    """Pair each query with its gold label index; unlabeled queries are dropped."""
    lookup = point_label_for_query if level == "point" else interval_label_for_query
    label_index = {
        name: i for i, name in enumerate(ModelConfig(level=level).labels)
    }
    out, dropped = [], 0
    for query in queries:
        name = lookup(query, labels)
        if name is None:
            dropped += 1
            continue
        out.append(LabeledExample(query.text, label_index[name]))
    if dropped:
        log.warning("dropped %d queries with no gold label", dropped)
    if not out:
        raise DataFormatError("no labeled queries to train on")
    return out


def split_validation(
    queries: Sequence[Query], fraction: float = 0.1
) -> tuple[list[Query], list[Query]]:
    """Deterministic hash split, stable across runs and machines."""
    train, val = [], []
    for query in queries:
        digest = hashlib.sha256(query.query_id.encode()).digest()
        bucket = int.from_bytes(digest[:8], "big") / 2 ** 64
        (val if bucket < fraction else train).append(query)
    return train, val


def macro_f1(pred: Sequence[int], gold: Sequence[int], n_labels: int) -> float:
    total = 0.0
    for label in range(n_labels):
        tp = sum(p == label and g == label for p, g in zip(pred, gold))
        fp = sum(p == label and g != label for p, g in zip(pred, gold))
        fn = sum(p != label and g == label for p, g in zip(pred, gold))
        if 2 * tp + fp + fn:
            total += 2 * tp / (2 * tp + fp + fn)
    return total / n_labels


def _cosine_warmup(step: int, total: int, warmup: int) -> float:
    if warmup and step < warmup:
        return (step + 1) / warmup
    span = max(1, total - warmup)
    progress = min(1.0, (step - warmup) / span)
    return 0.5 * (1.0 + math.cos(math.pi * progress))


def _evaluate(model: PointRelationModel, examples: Sequence[LabeledExample]) -> float:
    probs = model.predict_probabilities([ex.text for ex in examples])
    pred = probs.argmax(dim=-1).tolist()
    return macro_f1(pred, [ex.label for ex in examples], model.config.n_labels)


def train(
    config: ModelConfig,
    train_examples: Sequence[LabeledExample],
    val_examples: Optional[Sequence[LabeledExample]] = None,
) -> TrainResult:
    torch.manual_seed(config.seed)
    model = PointRelationModel(config)
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    steps_per_epoch = math.ceil(len(train_examples) / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    warmup = int(total_steps * config.warmup_fraction)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: _cosine_warmup(step, total_steps, warmup)
    )
    loss_fn = nn.CrossEntropyLoss(label_smoothing=config.label_smoothing)
    generator = torch.Generator().manual_seed(config.seed)

    result = TrainResult(model=model)
    best_state = {k: v.clone() for k, v in model.state_dict().items()}
    best_f1 = -1.0
    evals_since_best = 0
    step = 0
    stop = False

    def maybe_eval() -> None:
        nonlocal best_f1, best_state, evals_since_best, stop
        if not val_examples:
            return
        f1 = _evaluate(model, val_examples)
        model.train()
        result.eval_curve.append((step, f1))
        if f1 > best_f1:
            best_f1 = f1
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
            evals_since_best = 0
        else:
            evals_since_best += 1
            if evals_since_best >= config.patience:
                log.info("early stopping at step %d (best val macro-F1 %.4f)", step, best_f1)
                stop = True

    model.train()
    for _ in range(config.epochs):
        order = torch.randperm(len(train_examples), generator=generator).tolist()
        for start in range(0, len(order), config.batch_size):
            batch = [train_examples[i] for i in order[start:start + config.batch_size]]
            logits = model([ex.text for ex in batch])
            loss = loss_fn(logits, torch.tensor([ex.label for ex in batch]))
            optimizer.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
            optimizer.step()
            scheduler.step()
            step += 1
            result.loss_curve.append(loss.item())
            if val_examples and step % config.eval_every == 0:
                maybe_eval()
            if stop:
                break
        if stop:
            break

    if val_examples:
        if not stop:
            maybe_eval()
        model.load_state_dict(best_state)
        result.best_val_f1 = best_f1
    model.eval()
    result.steps = step
    return result
