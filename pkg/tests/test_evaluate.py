import json

import numpy as np
import pytest

from funcpool.data import toy_dataset
from funcpool.evaluate import CVReport, FoldResult, accuracy, cross_validate
from funcpool.model import ModelConfig
from funcpool.optim import TrainConfig, init_model

FAST = TrainConfig(epochs=3, seed=5)


def test_two_folds_on_four_graphs():
    ds = toy_dataset(4, seed=0)
    report = cross_validate(ds, "mean", FAST, k=2, grid_res=2)
    assert report.k == 2
    assert [f.n_test for f in report.folds] == [2, 2]
    assert [f.n_train for f in report.folds] == [2, 2]


def test_mean_and_std_recomputable():
    ds = toy_dataset(12, seed=1)
    report = cross_validate(ds, "function", FAST, k=3, grid_res=2)
    accs = np.array(report.fold_accuracies)
    assert abs(report.mean - accs.mean()) < 1e-12
    assert abs(report.std - np.sqrt(np.mean((accs - accs.mean()) ** 2))) < 1e-12
    assert all(0.0 <= a <= 1.0 for a in accs)
    assert [f.seed for f in report.folds] == [5, 6, 7]


def test_parallel_matches_serial():
    ds = toy_dataset(9, seed=2)
    serial = cross_validate(ds, "sum", FAST, k=3)
    parallel = cross_validate(ds, "sum", FAST, k=3, jobs=2)
    assert serial.to_json() == parallel.to_json()


def test_json_excludes_timing_by_default():
    ds = toy_dataset(4, seed=3)
    report = cross_validate(ds, "mean", FAST, k=2)
    data = json.loads(report.to_json())
    assert "elapsed_seconds" not in data
    assert "elapsed_seconds" in json.loads(report.to_json(include_timing=True))
    assert data["fold_accuracies"] == report.fold_accuracies


def test_failed_fold_is_flagged_and_others_continue():
    report = CVReport(
        "X",
        "function",
        0,
        folds=[FoldResult(0, 0, 3, 1, 1.0), FoldResult(1, 1, 3, 1, None, error="nan"), FoldResult(2, 2, 3, 1, 0.5)],
    )
    assert report.failed_folds == [1]
    assert report.mean == pytest.approx(0.75)
    assert "FAILED" in report.format_table() and "WARNING" in report.format_table()


def test_diverging_training_marks_fold_failed():
    ds = toy_dataset(4, seed=4)
    report = cross_validate(ds, "mean", TrainConfig(epochs=2, seed=0, lr=1e300), k=2)
    assert report.failed_folds
    assert all(f.error for f in report.folds if f.failed)


def test_accuracy_ties_go_to_lowest_class():
    ds = toy_dataset(4, num_classes=2, seed=5)
    m = init_model(ModelConfig(num_labels=3, num_classes=2, pooling="sum"), seed=0)
    for _, p, _ in m.parameters():
        p[...] = 0.0  # constant logits -> tie
    assert all(m.predict(g).predicted_class == 0 for g in ds.graphs)
    assert accuracy(m, ds.graphs) == 0.5
