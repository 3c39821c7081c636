"""Command-line front-end: train on labeled queries, predict probability files."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .data import (
    DataFormatError,
    read_interval_labels,
    read_point_labels,
    read_queries,
    write_probability_file,
)
from .model import MissingSpecialToken, ModelConfig, PointRelationModel, VocabularyMismatch
from .train import join_labels, split_validation, train


@click.group()
def cli():
    """Train and run the point/interval relation classifier."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@cli.command("train")
@click.option("--queries", required=True, type=click.Path(exists=True),
              help="Tagged-query file (line-delimited JSON).")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True),
              help="Point or interval dataset file supplying gold labels.")
@click.option("--level", default="point", type=click.Choice(["point", "interval"]))
@click.option("--out", required=True, type=click.Path(), help="Checkpoint path.")
@click.option("--hidden-size", default=32, show_default=True)
@click.option("--epochs", default=10, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--learning-rate", default=3e-4, show_default=True)
@click.option("--eval-every", default=2000, show_default=True)
@click.option("--patience", default=10, show_default=True)
@click.option("--val-fraction", default=0.1, show_default=True)
@click.option("--seed", default=0, show_default=True)
def train_cmd(queries, labels_path, level, out, hidden_size, epochs, batch_size,
              learning_rate, eval_every, patience, val_fraction, seed):
    """Train a classifier on tagged queries joined with gold labels."""
    config = ModelConfig(
        level=level, hidden_size=hidden_size, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, eval_every=eval_every, patience=patience, seed=seed,
    )
    all_queries = read_queries(queries)
    reader = read_point_labels if level == "point" else read_interval_labels
    label_table = reader(labels_path)
    train_queries, val_queries = split_validation(all_queries, val_fraction)
    if not val_queries:
        train_queries, val_queries = all_queries, []
    train_examples = join_labels(train_queries, label_table, level)
    val_examples = join_labels(val_queries, label_table, level) if val_queries else None
    result = train(config, train_examples, val_examples)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    result.model.save(out)
    click.echo(
        f"trained {result.steps} steps on {len(train_examples)} examples; "
        f"best validation macro-F1 {result.best_val_f1:.4f}; checkpoint {out}"
    )


@cli.command("predict")
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--queries", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--batch-size", default=64, show_default=True)
def predict_cmd(checkpoint, queries, out, batch_size):
    """Write one probability record per query.

    Point checkpoints emit {query_id, p_before, p_equal, p_after}; interval
    checkpoints emit {doc_id, source, target, predicted_relation, scores}.
    """
    model = PointRelationModel.load(checkpoint)
    records = model.predict_queries(read_queries(queries), batch_size)
    write_probability_file(out, records)
    click.echo(f"wrote {len(records)} records to {out}")


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
    except (DataFormatError, MissingSpecialToken, VocabularyMismatch, OSError, ValueError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
