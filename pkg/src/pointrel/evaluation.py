"""Classification and closure-aware metrics.

Accuracy, macro-F1 with per-label breakdowns, temporal awareness (the
closure-aware F1 between reduced and closed relation graphs), bootstrap
confidence intervals, and quantile-binned calibration curves with expected
calibration error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Optional, Sequence

import numpy as np

from .algebra import (
    InconsistencyError,
    IntervalAssertion,
    entails,
    interval_closure,
    transitive_reduction,
)

log = logging.getLogger(__name__)


class LengthMismatch(Exception):
    pass


class InsufficientData(Exception):
    pass


def _check_paired(pred: Sequence, gold: Sequence) -> None:
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gold)} gold labels")
    if not gold:
        raise LengthMismatch("empty inputs")


def accuracy(pred: Sequence[Hashable], gold: Sequence[Hashable]) -> float:
    _check_paired(pred, gold)
    return sum(p == g for p, g in zip(pred, gold)) / len(gold)


def per_label_f1(
    pred: Sequence[Hashable], gold: Sequence[Hashable], label_set: Sequence[Hashable]
) -> dict[Hashable, tuple[float, int]]:
    """F1 and gold support per label. Labels absent from both sides get 0."""
    _check_paired(pred, gold)
    out: dict[Hashable, tuple[float, int]] = {}
    for label in label_set:
        tp = sum(p == label and g == label for p, g in zip(pred, gold))
        fp = sum(p == label and g != label for p, g in zip(pred, gold))
        fn = sum(p != label and g == label for p, g in zip(pred, gold))
        f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
        out[label] = (f1, tp + fn)
    return out


def macro_f1(
    pred: Sequence[Hashable], gold: Sequence[Hashable], label_set: Sequence[Hashable]
) -> float:
    scores = per_label_f1(pred, gold, label_set)
    return sum(f1 for f1, _ in scores.values()) / len(label_set)


@dataclass
class AwarenessScore:
    precision: float
    recall: float
    f_a: float
    # Micro-aggregation terms, kept for inspection.
    precision_numerator: int = 0
    precision_denominator: int = 0
    recall_numerator: int = 0
    recall_denominator: int = 0


def _closure_or_fallback(
    assertions: set[IntervalAssertion], doc_id: str
) -> tuple[set[IntervalAssertion], set[IntervalAssertion]]:
    """(closure, reduction) of a relation set, degrading gracefully.

    When the set is inconsistent (possible for independently classified
    pairs) the raw canonicalized set stands in for both.
    """
    try:
        closed = interval_closure(assertions)
        reduced = transitive_reduction(assertions)
        return closed, reduced
    except InconsistencyError as exc:
        log.warning("%s: inconsistent relation set, scoring unclosed (%s)", doc_id, exc)
        raw = {a.canonical() for a in assertions}
        return raw, raw


def temporal_awareness(
    gold: Mapping[str, set[IntervalAssertion]],
    pred: Mapping[str, set[IntervalAssertion]],
) -> AwarenessScore:
    """Closure-aware precision/recall/F1, micro-aggregated over documents.

    Precision counts reduced predicted relations entailed by the gold
    closure; recall counts reduced gold relations entailed by the predicted
    closure.
    """
    p_num = p_den = r_num = r_den = 0
    for doc_id in sorted(set(gold) | set(pred)):
        gold_set = gold.get(doc_id, set())
        pred_set = pred.get(doc_id, set())
        gold_closed, gold_reduced = _closure_or_fallback(gold_set, doc_id)
        pred_closed, pred_reduced = _closure_or_fallback(pred_set, doc_id)
        p_num += sum(entails(gold_closed, a) for a in pred_reduced)
        p_den += len(pred_reduced)
        r_num += sum(entails(pred_closed, a) for a in gold_reduced)
        r_den += len(gold_reduced)
    precision = p_num / p_den if p_den else 0.0
    recall = r_num / r_den if r_den else 0.0
    f_a = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return AwarenessScore(precision, recall, f_a, p_num, p_den, r_num, r_den)


def bootstrap_ci(
    metric: Callable[[Sequence, Sequence], float],
    pred: Sequence,
    gold: Sequence,
    resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval, resampling examples with replacement."""
    _check_paired(pred, gold)
    rng = np.random.default_rng(seed)
    n = len(gold)
    stats = np.empty(resamples)
    pred = list(pred)
    gold = list(gold)
    for i in range(resamples):
        idx = rng.integers(0, n, size=n)
        stats[i] = metric([pred[j] for j in idx], [gold[j] for j in idx])
    alpha = (1.0 - level) / 2.0
    low, high = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(low), float(high)


@dataclass
class CalibrationCurve:
    label: Hashable
    mean_confidence: list[float]
    positive_fraction: list[float]
    counts: list[int]
    ece: float
    support: int


def _one_vs_rest_curve(
    confidences: np.ndarray, positives: np.ndarray, bins: int, label: Hashable
) -> CalibrationCurve:
    order = np.argsort(confidences, kind="stable")
    chunks = np.array_split(order, bins)
    mean_conf, pos_frac, counts = [], [], []
    ece = 0.0
    n = len(confidences)
    for chunk in chunks:
        if len(chunk) == 0:
            continue
        conf = float(confidences[chunk].mean())
        frac = float(positives[chunk].mean())
        mean_conf.append(conf)
        pos_frac.append(frac)
        counts.append(len(chunk))
        ece += (len(chunk) / n) * abs(frac - conf)
    return CalibrationCurve(label, mean_conf, pos_frac, counts, ece, int(positives.sum()))


def calibration(
    distributions: Sequence[Mapping[Hashable, float]],
    gold: Sequence[Hashable],
    label_set: Sequence[Hashable],
    bins: int = 20,
) -> tuple[dict[Hashable, CalibrationCurve], float]:
    """One-vs-rest quantile-binned calibration per label, plus overall ECE.

    Each example must carry a normalized distribution over `label_set`.
    The overall ECE averages per-label ECEs weighted by gold support.
    Raises InsufficientData when there are fewer examples than bins.
    """
    _check_paired(distributions, gold)
    if len(gold) < bins:
        raise InsufficientData(f"{len(gold)} examples < {bins} bins")
    curves: dict[Hashable, CalibrationCurve] = {}
    for label in label_set:
        conf = np.array([float(d.get(label, 0.0)) for d in distributions])
        pos = np.array([g == label for g in gold], dtype=float)
        curves[label] = _one_vs_rest_curve(conf, pos, bins, label)
    total_support = sum(c.support for c in curves.values())
    if total_support == 0:
        overall = 0.0
    else:
        overall = sum(c.ece * c.support for c in curves.values()) / total_support
    return curves, overall


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_label_f1: dict
    f_a: Optional[AwarenessScore] = None
    bootstrap: dict = field(default_factory=dict)
    calibration_curves: dict = field(default_factory=dict)
    ece: Optional[float] = None

    def to_dict(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_label_f1": {
                str(label): {"f1": f1, "support": support}
                for label, (f1, support) in self.per_label_f1.items()
            },
            "bootstrap": {k: list(v) for k, v in self.bootstrap.items()},
        }
        if self.f_a is not None:
            out["temporal_awareness"] = {
                "precision": self.f_a.precision,
                "recall": self.f_a.recall,
                "f_a": self.f_a.f_a,
            }
        if self.ece is not None:
            out["ece"] = self.ece
        return out

    def render_text(self) -> str:
        lines = [
            f"accuracy: {self.accuracy:.4f}",
            f"macro_f1: {self.macro_f1:.4f}",
        ]
        if self.f_a is not None:
            lines += [
                f"temporal_awareness.precision: {self.f_a.precision:.4f}",
                f"temporal_awareness.recall: {self.f_a.recall:.4f}",
                f"temporal_awareness.f_a: {self.f_a.f_a:.4f}",
            ]
        if self.ece is not None:
            lines.append(f"ece: {self.ece:.4f}")
        for metric, (low, high) in sorted(self.bootstrap.items()):
            lines.append(f"bootstrap.{metric}: [{low:.4f}, {high:.4f}]")
        lines.append("per_label_f1:")
        for label, (f1, support) in self.per_label_f1.items():
            lines.append(f"  {label}: f1={f1:.4f} support={support}")
        return "\n".join(lines) + "\n"


def curves_to_csv(curves: Mapping[Hashable, CalibrationCurve]) -> str:
    rows = ["label,bin,mean_confidence,positive_fraction,count"]
    for label, curve in curves.items():
        for i, (conf, frac, count) in enumerate(
            zip(curve.mean_confidence, curve.positive_fraction, curve.counts)
        ):
            rows.append(f"{label},{i},{conf:.6f},{frac:.6f},{count}")
    return "\n".join(rows) + "\n"
