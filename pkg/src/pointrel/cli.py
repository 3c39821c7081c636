"""Batch command-line front-end.

Verbs: convert, augment, stats, encode, decode, evaluate, calibrate.
Every command is deterministic given its flags; all randomness flows from
explicit seeds, and reports embed the resolved configuration.

Exit codes: 0 success, 1 usage error, 2 data error, 3 inconsistency.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import sys
from pathlib import Path

import click

from . import __version__
from .algebra import (
    AllenRelation,
    InconsistencyError,
    IntervalAssertion,
    PointEndpoint,
    Side,
)
from .corpus import ParseError, Split, load_corpus, DEFAULT_SPLIT_SEED
from .dataset import (
    IntervalExample,
    Provenance,
    augment_closure,
    augment_inverse,
    build_training_sets,
    interval_closure_augment,
    read_interval_dataset,
    read_point_dataset,
    rebalance_lt_gt,
    stats_table,
    write_interval_dataset,
    write_point_dataset,
)
from .decoder import (
    ALL_RELATIONS,
    OBSERVED_RELATIONS,
    ConstantPredictor,
    FilePredictor,
    GoldOraclePredictor,
    MissingPrediction,
    PointRelation,
    Predictor,
    RandomPredictor,
    classify_pair,
)
from .encoding import Direction, tag_point_pair, tag_interval_pair, write_queries
from .evaluation import (
    InsufficientData,
    LengthMismatch,
    accuracy,
    bootstrap_ci,
    calibration,
    curves_to_csv,
    macro_f1,
    per_label_f1,
    temporal_awareness,
    EvalReport,
)

log = logging.getLogger(__name__)


def _load_split(root: str, split: str, seed: int):
    docs = load_corpus(root, Split(split), seed=seed)
    if not docs:
        raise IOError(f"no documents in split {split!r} under {root}")
    return docs


def _relation_set(mode: str):
    return OBSERVED_RELATIONS if mode == "observed-11" else ALL_RELATIONS


@click.group()
@click.version_option(__version__)
def cli():
    """Point-relation toolkit for fine-grained temporal relation classification."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


root_option = click.option("--root", required=True, type=click.Path(exists=False), help="Corpus root directory.")
split_option = click.option("--split", default="train", type=click.Choice(["train", "validation", "test"]))
split_seed_option = click.option("--split-seed", default=DEFAULT_SPLIT_SEED, show_default=True)
out_option = click.option("--out", required=True, type=click.Path(), help="Output directory.")


@cli.command()
@root_option
@split_option
@split_seed_option
@out_option
def convert(root, split, split_seed, out):
    """Convert a corpus split into raw point and interval dataset files."""
    docs = _load_split(root, split, split_seed)
    point_sets, interval_sets = build_training_sets(docs)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_point_dataset(out_dir / "point_raw.jsonl", point_sets["raw"])
    write_interval_dataset(out_dir / "interval_raw.jsonl", interval_sets["raw"])
    click.echo(json.dumps(stats_table(point_sets["raw"]), indent=2, sort_keys=True))


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True), help="Directory holding converted datasets.")
@click.option("--strategy", required=True, type=click.Choice(["inverse", "closure", "both"]))
@click.option("--rebalance-seed", default=0, show_default=True)
@out_option
def augment(data, strategy, rebalance_seed, out):
    """Produce the augmented training sets from a converted dataset."""
    data_dir = Path(data)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw_points = read_point_dataset(data_dir / "point_raw.jsonl")
    raw_intervals = read_interval_dataset(data_dir / "interval_raw.jsonl")

    if strategy in ("inverse",):
        write_point_dataset(out_dir / "point_inverse.jsonl", augment_inverse(raw_points))
        write_interval_dataset(out_dir / "interval_inverse.jsonl", augment_inverse(raw_intervals))
        return
    closure_points = augment_inverse(
        rebalance_lt_gt(augment_closure((), raw_points), seed=rebalance_seed)
    )
    closure_intervals = augment_inverse(interval_closure_augment(raw_intervals))
    if strategy == "closure":
        write_point_dataset(out_dir / "point_closure.jsonl", closure_points)
        write_interval_dataset(out_dir / "interval_closure.jsonl", closure_intervals)
        return
    # both: inverse, closure, and inverse & closure
    write_point_dataset(out_dir / "point_inverse.jsonl", augment_inverse(raw_points))
    write_interval_dataset(out_dir / "interval_inverse.jsonl", augment_inverse(raw_intervals))
    write_point_dataset(out_dir / "point_closure.jsonl", closure_points)
    write_interval_dataset(out_dir / "interval_closure.jsonl", closure_intervals)
    write_point_dataset(out_dir / "point_inverse_closure.jsonl", augment_inverse(closure_points))
    write_interval_dataset(
        out_dir / "interval_inverse_closure.jsonl", augment_inverse(closure_intervals)
    )


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True), help="A point dataset file.")
def stats(data):
    """Print the (endpoint pair, relation) count table of a point dataset."""
    examples = read_point_dataset(data)
    click.echo(json.dumps(stats_table(examples), indent=2, sort_keys=True))


@cli.command()
@root_option
@split_option
@split_seed_option
@click.option("--level", default="point", type=click.Choice(["point", "interval"]))
@click.option("--out", "out_file", required=True, type=click.Path(), help="Query file to write.")
def encode(root, split, split_seed, level, out_file):
    """Emit tagged queries for every gold-annotated pair of a split."""
    docs = _load_split(root, split, split_seed)
    queries = []
    for doc in docs:
        for link in doc.tlinks:
            if level == "interval":
                queries.append(tag_interval_pair(doc, link.source, link.target))
                continue
            for x_side in (Side.START, Side.END):
                for y_side in (Side.START, Side.END):
                    x = PointEndpoint(link.source, x_side)
                    y = PointEndpoint(link.target, y_side)
                    queries.append(tag_point_pair(doc, x, y, Direction.FORWARD))
                    queries.append(tag_point_pair(doc, x, y, Direction.SWAPPED))
    write_queries(out_file, queries)
    click.echo(f"wrote {len(queries)} queries to {out_file}")


def _build_predictor(spec: str, docs, seed: int) -> Predictor | str:
    """Predictor from its CLI spec.

    Returns the string "random-interval" for the direct interval-label
    sampler, which bypasses the point decoder.
    """
    if spec == "majority":
        return ConstantPredictor(PointRelation.BEFORE)
    if spec == "random":
        return RandomPredictor(seed)
    if spec == "random-interval":
        return "random-interval"
    if spec.startswith("oracle"):
        noise = 0.0
        if ":" in spec:
            _, arg = spec.split(":", 1)
            key, _, value = arg.partition("=")
            if key != "noise":
                raise click.UsageError(f"unknown oracle argument {key!r}")
            noise = float(value)
        return GoldOraclePredictor(docs, noise=noise, seed=seed)
    if spec.startswith("file:"):
        return FilePredictor(spec[len("file:"):])
    raise click.UsageError(f"unknown predictor spec {spec!r}")


def decode_split(docs, predictor, relation_set, seed: int) -> list[dict]:
    """One prediction record per gold pair."""
    records = []
    for doc in docs:
        for link in doc.tlinks:
            if predictor == "random-interval":
                digest = hashlib.sha256(
                    f"{seed}|{doc.id}|{link.source}|{link.target}".encode()
                ).digest()
                rng = random.Random(int.from_bytes(digest[:8], "big"))
                relation = rng.choice(list(relation_set))
                scores = {r.value: (1.0 if r is relation else 0.0) for r in relation_set}
            else:
                prediction = classify_pair(doc, link.source, link.target, predictor, relation_set)
                relation = prediction.relation
                scores = {r.value: s for r, s in prediction.scores.items()}
            records.append({
                "doc_id": doc.id,
                "source": link.source,
                "target": link.target,
                "predicted_relation": relation.value,
                "scores": scores,
            })
    return records


@cli.command()
@root_option
@split_option
@split_seed_option
@click.option("--predictor", "predictor_spec", default="majority", show_default=True,
              help="random | random-interval | majority | oracle[:noise=F] | file:PATH")
@click.option("--predictor-seed", default=0, show_default=True)
@click.option("--relation-set", default="full-13", type=click.Choice(["full-13", "observed-11"]))
@click.option("--out", "out_file", required=True, type=click.Path())
def decode(root, split, split_seed, predictor_spec, predictor_seed, relation_set, out_file):
    """Predict an interval relation for every gold pair of a split."""
    docs = _load_split(root, split, split_seed)
    predictor = _build_predictor(predictor_spec, docs, predictor_seed)
    records = decode_split(docs, predictor, _relation_set(relation_set), predictor_seed)
    with Path(out_file).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    click.echo(f"wrote {len(records)} predictions to {out_file}")


def _read_predictions(path: str) -> dict[tuple[str, str, str], dict]:
    table = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        table[(rec["doc_id"], rec["source"], rec["target"])] = rec
    return table


def evaluate_predictions(docs, predictions: dict, bootstrap_resamples: int, seed: int,
                         calibration_bins: int = 20) -> EvalReport:
    gold_labels, pred_labels, score_dists = [], [], []
    gold_by_doc: dict[str, set[IntervalAssertion]] = {}
    pred_by_doc: dict[str, set[IntervalAssertion]] = {}
    for doc in docs:
        for link in doc.tlinks:
            key = (doc.id, link.source, link.target)
            if key not in predictions:
                raise MissingPrediction(f"no prediction for gold pair {key}")
            rec = predictions[key]
            predicted = AllenRelation(rec["predicted_relation"])
            gold_labels.append(link.relation)
            pred_labels.append(predicted)
            if rec.get("scores"):
                total = sum(rec["scores"].values())
                if total > 0:
                    score_dists.append(
                        {AllenRelation(k): v / total for k, v in rec["scores"].items()}
                    )
            gold_by_doc.setdefault(doc.id, set()).add(link.assertion())
            pred_by_doc.setdefault(doc.id, set()).add(
                IntervalAssertion(link.source, predicted, link.target)
            )
    label_set = list(OBSERVED_RELATIONS)
    report = EvalReport(
        accuracy=accuracy(pred_labels, gold_labels),
        macro_f1=macro_f1(pred_labels, gold_labels, label_set),
        per_label_f1=per_label_f1(pred_labels, gold_labels, label_set),
        f_a=temporal_awareness(gold_by_doc, pred_by_doc),
    )
    if bootstrap_resamples > 0:
        report.bootstrap["accuracy"] = bootstrap_ci(
            accuracy, pred_labels, gold_labels, bootstrap_resamples, seed=seed
        )
        report.bootstrap["macro_f1"] = bootstrap_ci(
            lambda p, g: macro_f1(p, g, label_set),
            pred_labels, gold_labels, bootstrap_resamples, seed=seed,
        )
    if len(score_dists) == len(gold_labels) and len(gold_labels) >= calibration_bins:
        curves, ece = calibration(score_dists, gold_labels, label_set, bins=calibration_bins)
        report.calibration_curves = curves
        report.ece = ece
    return report


@cli.command()
@root_option
@split_option
@split_seed_option
@click.option("--predictions", required=True, type=click.Path(exists=True))
@click.option("--bootstrap", "bootstrap_resamples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@out_option
def evaluate(root, split, split_seed, predictions, bootstrap_resamples, seed, out):
    """Score a predictions file against the gold pairs of a split."""
    docs = _load_split(root, split, split_seed)
    table = _read_predictions(predictions)
    report = evaluate_predictions(docs, table, bootstrap_resamples, seed)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = {
        "root": str(root), "split": split, "split_seed": split_seed,
        "predictions": str(predictions), "bootstrap": bootstrap_resamples,
        "seed": seed,
    }
    payload = {"config": config, **report.to_dict()}
    (out_dir / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    (out_dir / "report.txt").write_text(report.render_text())
    if report.calibration_curves:
        (out_dir / "calibration.csv").write_text(curves_to_csv(report.calibration_curves))
    click.echo(report.render_text())


@cli.command()
@root_option
@split_option
@split_seed_option
@click.option("--predictions", required=True, type=click.Path(exists=True))
@click.option("--bins", default=20, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path())
def calibrate(root, split, split_seed, predictions, bins, out_file):
    """Export calibration curves for a predictions file with scores."""
    docs = _load_split(root, split, split_seed)
    table = _read_predictions(predictions)
    gold_labels, score_dists = [], []
    for doc in docs:
        for link in doc.tlinks:
            rec = table.get((doc.id, link.source, link.target))
            if rec is None or not rec.get("scores"):
                raise MissingPrediction(f"no scored prediction for {(doc.id, link.source, link.target)}")
            total = sum(rec["scores"].values()) or 1.0
            score_dists.append({AllenRelation(k): v / total for k, v in rec["scores"].items()})
            gold_labels.append(link.relation)
    curves, ece = calibration(score_dists, gold_labels, list(OBSERVED_RELATIONS), bins=bins)
    Path(out_file).write_text(curves_to_csv(curves))
    click.echo(f"overall ECE: {ece:.4f}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except InconsistencyError as exc:
        click.echo(f"inconsistency: {exc}", err=True)
        return 3
    except (ParseError, MissingPrediction, InsufficientData, LengthMismatch,
            OSError, ValueError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
