import csv

import numpy as np
import pytest
import ujson
from pydantic import ValidationError

from hyfi.evaluation import (
    EvalReport,
    EvalRun,
    EvalSettings,
    Representation,
    SplitSpec,
    fit_classifier,
    linear_evaluate,
    make_splits,
    node_embeddings,
    split_sizes,
    write_embeddings_csv,
    write_eval_report,
)
from hyfi.logging.exceptions import (
    DimensionMismatchException,
    HyfiWarning,
    SplitException,
)
from hyfi.objects import LabelVector
from hyfi.training import EncoderConfig, TrainConfig, initial_parameters

FAST = EvalSettings(epochs=200)


class TestSplits:
    @pytest.mark.parametrize(
        "n, expected",
        [(100, (10, 10, 80)), (101, (10, 10, 81)), (30, (3, 3, 24)), (10, (1, 1, 8))],
    )
    def test_sizes(self, n, expected):
        assert split_sizes(n, SplitSpec()) == expected

    def test_too_few_nodes(self):
        with pytest.raises(SplitException):
            split_sizes(9, SplitSpec())

    def test_splits_partition_the_nodes(self):
        spec = SplitSpec(num_splits=5)
        splits = make_splits(57, spec)
        assert [split.index for split in splits] == list(range(5))
        for split in splits:
            joined = np.concatenate([split.train, split.valid, split.test])
            assert sorted(joined.tolist()) == list(range(57))
            assert np.all(np.diff(split.train) > 0)

    def test_splits_are_deterministic(self):
        first = make_splits(50, SplitSpec(seed=4))
        second = make_splits(50, SplitSpec(seed=4))
        other = make_splits(50, SplitSpec(seed=5))
        assert all(np.array_equal(a.train, b.train) for a, b in zip(first, second))
        assert not np.array_equal(first[0].train, other[0].train)
        assert not np.array_equal(first[0].train, first[1].train)

    @pytest.mark.parametrize(
        "fields",
        [
            {"train_frac": 0.5, "valid_frac": 0.5, "test_frac": 0.5},
            {"num_splits": 0},
            {"num_inits": 0},
            {"test_frac": 1.0},
            {"seed": -1},
        ],
    )
    def test_invalid_spec(self, fields):
        with pytest.raises(ValidationError):
            SplitSpec(**fields)


class TestLinearEvaluate:
    def test_one_hot_embeddings_are_perfect(self):
        labels = LabelVector(np.arange(300) % 3)
        embeddings = np.eye(3)[labels.labels]
        report = linear_evaluate(
            embeddings, labels, SplitSpec(num_splits=3, num_inits=2), FAST
        )
        assert len(report.runs) == 6
        assert report.mean == 1.0
        assert report.std == 0.0

    def test_identical_rows_are_chance(self):
        labels = LabelVector(np.arange(200) % 2)
        embeddings = np.ones((200, 4))
        report = linear_evaluate(
            embeddings, labels, SplitSpec(num_splits=4, num_inits=1), FAST
        )
        assert 0.35 <= report.mean <= 0.65

    def test_split_missing_a_class_is_skipped(self):
        values = np.zeros(100, dtype=np.int64)
        values[[3, 27, 51, 70, 94]] = 1
        labels = LabelVector(values)
        embeddings = np.random.default_rng(0).normal(size=(100, 3))
        with pytest.warns(HyfiWarning, match="absent from the training part"):
            report = linear_evaluate(
                embeddings,
                labels,
                SplitSpec(num_splits=20, num_inits=1),
                EvalSettings(epochs=50),
            )
        assert report.skipped_splits
        assert len(report.runs) == 20 - len(report.skipped_splits)
        assert not {run.split for run in report.runs} & set(report.skipped_splits)

    def test_embeddings_are_not_modified(self):
        labels = LabelVector(np.arange(40) % 2)
        embeddings = np.random.default_rng(1).normal(size=(40, 5))
        before = embeddings.copy()
        linear_evaluate(embeddings, labels, SplitSpec(num_splits=2, num_inits=1), FAST)
        assert np.array_equal(embeddings, before)
        assert embeddings.flags.writeable

    def test_is_deterministic(self):
        labels = LabelVector(np.arange(60) % 3)
        embeddings = np.random.default_rng(2).normal(size=(60, 4))
        spec = SplitSpec(num_splits=2, num_inits=2, seed=8)
        first = linear_evaluate(embeddings, labels, spec, FAST)
        second = linear_evaluate(embeddings, labels, spec, FAST)
        assert first == second

    def test_row_count_mismatch(self):
        with pytest.raises(DimensionMismatchException):
            linear_evaluate(np.ones((10, 2)), LabelVector(np.arange(12) % 2), SplitSpec())

    def test_ties_keep_the_earliest_epoch(self):
        rng = np.random.default_rng(3)
        x_train = rng.normal(size=(20, 3))
        y_train = np.arange(20) % 2
        # zero inputs score the bias only; argmax of equal logits is class 0
        x_valid = np.zeros((5, 3))
        y_valid = np.zeros(5, dtype=np.int64)
        best, epoch, accuracy = fit_classifier(
            x_train, y_train, x_valid, y_valid, 2, rng, EvalSettings(epochs=30)
        )
        assert epoch == 0
        assert accuracy == 1.0
        assert np.array_equal(best["bias"], np.zeros(2))


class TestReport:
    def test_population_std(self):
        runs = [
            EvalRun(split=1, init=0, accuracy=1.0),
            EvalRun(split=0, init=0, accuracy=0.5),
        ]
        report = EvalReport.from_runs(runs, "abc")
        assert [run.split for run in report.runs] == [0, 1]
        assert report.mean == 0.75
        assert report.std == 0.25

    def test_no_runs(self):
        with pytest.raises(SplitException):
            EvalReport.from_runs([], "abc", skipped=[0, 1])

    def test_files(self, tmp_path):
        runs = [EvalRun(split=0, init=i, accuracy=a) for i, a in enumerate([0.5, 0.75])]
        report = EvalReport.from_runs(runs, "f" * 32, skipped=[3])
        write_eval_report(report, tmp_path)

        with open(tmp_path / "eval.csv", newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows == [["split", "init", "accuracy"], ["0", "0", "0.5"], ["0", "1", "0.75"]]
        with open(tmp_path / "eval_summary.json", encoding="utf-8") as handle:
            summary = ujson.load(handle)
        assert summary == {
            "mean": 0.625,
            "std": 0.125,
            "runCount": 2,
            "skippedSplits": [3],
            "configFingerprint": "f" * 32,
        }


class TestEmbeddings:
    @pytest.fixture()
    def params(self, planted_dataset):
        _, x, _ = planted_dataset
        cfg = TrainConfig(encoder=EncoderConfig(hidden_dim=6, proj_dim=4))
        return initial_parameters(x.feature_dim, cfg)

    @pytest.mark.parametrize(
        "representation, width", [(Representation.ENCODER, 6), ("projection", 4)]
    )
    def test_shapes(self, planted_dataset, params, representation, width):
        h, x, _ = planted_dataset
        embeddings = node_embeddings(h, x, params, representation=representation)
        assert embeddings.shape == (h.num_nodes, width)

    def test_csv_is_exact(self, planted_dataset, params, tmp_path):
        h, x, _ = planted_dataset
        embeddings = node_embeddings(h, x, params)
        path = write_embeddings_csv(embeddings, tmp_path / "embeddings.csv")
        assert np.array_equal(np.loadtxt(path, delimiter=","), embeddings)
