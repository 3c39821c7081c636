import json
from pathlib import Path

import pytest

from pointrel.cli import main
from pointrel.dataset import read_point_dataset


def run(*args) -> int:
    return main([str(a) for a in args])


class TestConvert:
    def test_writes_datasets(self, corpus_root, tmp_path, capsys):
        out = tmp_path / "data"
        assert run("convert", "--root", corpus_root, "--split", "test", "--out", out) == 0
        assert (out / "point_raw.jsonl").exists()
        assert (out / "interval_raw.jsonl").exists()
        # 6 gold links in the test split -> 24 point examples.
        assert len(read_point_dataset(out / "point_raw.jsonl")) == 24
        table = json.loads(capsys.readouterr().out)
        assert sum(sum(row.values()) for row in table.values()) == 24

    def test_missing_root_is_data_error(self, tmp_path):
        assert run("convert", "--root", tmp_path / "nope", "--split", "test",
                   "--out", tmp_path / "out") == 2

    def test_bad_flag_is_usage_error(self, tmp_path):
        assert run("convert", "--root", tmp_path, "--split", "weekend",
                   "--out", tmp_path / "out") == 1

    def test_rerun_byte_identical(self, corpus_root, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run("convert", "--root", corpus_root, "--split", "train", "--out", out1)
        run("convert", "--root", corpus_root, "--split", "train", "--out", out2)
        for name in ("point_raw.jsonl", "interval_raw.jsonl"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestAugmentAndStats:
    @pytest.fixture()
    def converted(self, corpus_root, tmp_path):
        out = tmp_path / "data"
        run("convert", "--root", corpus_root, "--split", "train", "--out", out)
        return out

    def test_both_strategies(self, converted, tmp_path):
        out = tmp_path / "aug"
        assert run("augment", "--data", converted, "--strategy", "both", "--out", out) == 0
        raw = read_point_dataset(converted / "point_raw.jsonl")
        inverse = read_point_dataset(out / "point_inverse.jsonl")
        closure = read_point_dataset(out / "point_closure.jsonl")
        both = read_point_dataset(out / "point_inverse_closure.jsonl")
        assert len(raw) < len(inverse)
        assert set(inverse) <= set(both)
        assert set(closure) <= set(both)
        assert (out / "interval_inverse_closure.jsonl").exists()

    def test_stats_table(self, converted, capsys):
        assert run("stats", "--data", converted / "point_raw.jsonl") == 0
        table = json.loads(capsys.readouterr().out)
        assert set(table) == {"ss", "se", "es", "ee"}
        for row in table.values():
            assert set(row) == {"<", "=", ">"}


class TestEncode:
    def test_point_queries(self, corpus_root, tmp_path):
        out = tmp_path / "queries.jsonl"
        assert run("encode", "--root", corpus_root, "--split", "test", "--out", out) == 0
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        # 6 links x 4 endpoint pairs x 2 directions.
        assert len(lines) == 48
        assert all("<xs>" in rec["text"] or "<xe>" in rec["text"] for rec in lines)
        assert all(rec["text"].startswith("Document creation time:") for rec in lines)

    def test_interval_queries(self, corpus_root, tmp_path):
        out = tmp_path / "queries.jsonl"
        run("encode", "--root", corpus_root, "--split", "test", "--level", "interval",
            "--out", out)
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(lines) == 6
        assert all("<x>" in rec["text"] and "<y>" in rec["text"] for rec in lines)


class TestDecodeAndEvaluate:
    def decode(self, corpus_root, out_file, predictor="oracle"):
        return run("decode", "--root", corpus_root, "--split", "test",
                   "--predictor", predictor, "--out", out_file)

    def test_oracle_scores_perfectly(self, corpus_root, tmp_path, capsys):
        preds = tmp_path / "preds.jsonl"
        assert self.decode(corpus_root, preds) == 0
        report_dir = tmp_path / "report"
        assert run("evaluate", "--root", corpus_root, "--split", "test",
                   "--predictions", preds, "--bootstrap", "50", "--out", report_dir) == 0
        report = json.loads((report_dir / "report.json").read_text())
        assert report["accuracy"] == pytest.approx(1.0)
        assert report["temporal_awareness"]["f_a"] == pytest.approx(1.0)
        assert report["config"]["split"] == "test"
        assert (report_dir / "report.txt").read_text().startswith("accuracy: 1.0000")

    def test_majority_baseline(self, corpus_root, tmp_path):
        preds = tmp_path / "preds.jsonl"
        self.decode(corpus_root, preds, predictor="majority")
        records = [json.loads(l) for l in preds.read_text().splitlines()]
        assert all(r["predicted_relation"] == "before" for r in records)

    def test_random_interval_deterministic(self, corpus_root, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        self.decode(corpus_root, a, predictor="random-interval")
        self.decode(corpus_root, b, predictor="random-interval")
        assert a.read_bytes() == b.read_bytes()

    def test_noisy_oracle_parses_spec(self, corpus_root, tmp_path):
        preds = tmp_path / "preds.jsonl"
        assert self.decode(corpus_root, preds, predictor="oracle:noise=0.25") == 0

    def test_unknown_predictor_is_usage_error(self, corpus_root, tmp_path):
        assert self.decode(corpus_root, tmp_path / "p.jsonl", predictor="psychic") == 1

    def test_file_predictor_missing_is_data_error(self, corpus_root, tmp_path):
        empty = tmp_path / "probs.jsonl"
        empty.write_text("")
        assert self.decode(corpus_root, tmp_path / "p.jsonl",
                           predictor=f"file:{empty}") == 2

    def test_evaluate_missing_prediction_is_data_error(self, corpus_root, tmp_path):
        preds = tmp_path / "preds.jsonl"
        self.decode(corpus_root, preds)
        lines = preds.read_text().splitlines()
        preds.write_text("\n".join(lines[:-1]) + "\n")
        assert run("evaluate", "--root", corpus_root, "--split", "test",
                   "--predictions", preds, "--out", tmp_path / "r") == 2

    def test_calibrate_insufficient_data_is_data_error(self, corpus_root, tmp_path):
        preds = tmp_path / "preds.jsonl"
        self.decode(corpus_root, preds)
        # Only 6 test pairs < 20 bins.
        assert run("calibrate", "--root", corpus_root, "--split", "test",
                   "--predictions", preds, "--out", tmp_path / "c.csv") == 2

    def test_calibrate_writes_curves(self, corpus_root, tmp_path):
        preds = tmp_path / "preds.jsonl"
        self.decode(corpus_root, preds)
        out = tmp_path / "c.csv"
        assert run("calibrate", "--root", corpus_root, "--split", "test",
                   "--predictions", preds, "--bins", "2", "--out", out) == 0
        header = out.read_text().splitlines()[0]
        assert header == "label,bin,mean_confidence,positive_fraction,count"
