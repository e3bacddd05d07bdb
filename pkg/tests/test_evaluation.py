"""
Tests for train/test splitting, confusion metrics and model comparison
"""

import numpy as np
import pytest

from models.edge import DECAY, PERSIST
from models.evaluation import EvalReport, SplitConfig
from utils.errors import DataError
from utils.evaluation import (
    bayes_rate,
    compare,
    confusion_counts,
    evaluate,
    f_measure,
    render_comparison,
    split,
)


def test_f_measure_of_reported_scores():
    """Test F for precision 0.780 and recall 0.754"""
    assert f_measure(0.780, 0.754) == pytest.approx(0.767, abs=5e-4)
    assert f_measure(0.0, 0.0) == 0.0


def test_metric_identities_on_random_predictions():
    """Test F is the harmonic mean and metrics stay in range for random confusion matrices"""
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        actual = rng.integers(0, 2, size=n)
        predicted = rng.integers(0, 2, size=n)
        report = evaluate(predicted, actual)
        for row in report.rows():
            c = row.counts
            assert c.total == n
            assert row.accuracy == pytest.approx((c.tp + c.tn) / n)
            for value in (row.precision, row.recall, row.f_measure):
                assert 0.0 <= value <= 1.0
            if row.precision + row.recall > 0:
                assert 1 / row.f_measure == pytest.approx((1 / row.precision + 1 / row.recall) / 2)
        assert report.persist.accuracy == report.decay.accuracy


def test_confusion_counts():
    """Test counts with persist as the positive class"""
    counts = confusion_counts([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert counts.to_dict() == {"tp": 2, "fp": 1, "tn": 1, "fn": 1}
    assert counts.swapped().to_dict() == {"tp": 1, "fp": 1, "tn": 2, "fn": 1}


def test_constant_predictor_is_flagged_degenerate():
    """Test an always-persist predictor on a 57/43 split"""
    actual = np.array([1] * 57 + [0] * 43)
    report = evaluate(np.ones(100, dtype=int), actual, "always")
    assert report.persist.accuracy == pytest.approx(0.57)
    assert report.persist.recall == 1.0
    assert report.persist.precision == pytest.approx(0.57)
    assert report.decay.precision == 0.0
    assert report.decay.recall == 0.0
    assert report.decay.f_measure == 0.0
    assert "decay.precision" in report.degenerate
    assert "persist.precision" not in report.degenerate


def test_label_swap_symmetry():
    """Test flipping every label exchanges the per-class rows"""
    rng = np.random.default_rng(1)
    actual = rng.integers(0, 2, size=200)
    predicted = rng.integers(0, 2, size=200)
    a = evaluate(predicted, actual)
    b = evaluate(1 - predicted, 1 - actual)
    for metric in ("accuracy", "precision", "recall", "f_measure"):
        assert a.persist.metric(metric) == pytest.approx(b.decay.metric(metric))
        assert a.decay.metric(metric) == pytest.approx(b.persist.metric(metric))


def test_evaluation_input_errors():
    """Test mismatched and empty inputs"""
    with pytest.raises(DataError):
        evaluate([1, 0], [1])
    with pytest.raises(DataError):
        evaluate([], [])


def test_report_round_trip():
    """Test a report rebuilds from its dictionary form"""
    report = evaluate([1, 0, 1, 1], [1, 0, 0, 1], "tree")
    assert EvalReport.from_dict(report.to_dict()) == report
    assert report.for_class(PERSIST) is report.persist
    assert report.for_class(DECAY) is report.decay
    with pytest.raises(DataError):
        EvalReport.from_dict({"model": "x"})


def test_split_sizes_and_disjointness(feature_table):
    """Test a 300-edge table splits 200/100 into disjoint parts"""
    frame = feature_table(n=300, seed=2)
    train, test = split(frame, SplitConfig(seed=4))
    assert (len(train), len(test)) == (200, 100)
    assert set(train["source"]).isdisjoint(test["source"])
    assert set(train["source"]) | set(test["source"]) == set(frame["source"])

    again, _ = split(frame, SplitConfig(seed=4))
    assert again.equals(train)
    other, _ = split(frame, SplitConfig(seed=5))
    assert not other.equals(train)


def test_stratified_split_keeps_class_shares(feature_table):
    """Test each class is split in the requested proportion"""
    frame = feature_table(n=300, seed=3)
    train, test = split(frame, SplitConfig(train_fraction=0.5, seed=0, stratify=True))
    n_persist = int(frame["class"].sum())
    assert abs(int(train["class"].sum()) - n_persist / 2) <= 1
    assert len(train) + len(test) == 300


def test_split_of_edge_sequences():
    """Test plain sequences split the same way as tables and keep input order"""
    items = list(range(30))
    train, test = split(items, SplitConfig(seed=1))
    assert len(train) == 20 and len(test) == 10
    assert train == sorted(train) and test == sorted(test)
    with pytest.raises(DataError):
        split([1], SplitConfig())


def test_compare_tabulates_models_side_by_side():
    """Test one column per (model, class) and numbered duplicates"""
    a = evaluate([1, 0, 1], [1, 0, 0], "tree")
    b = evaluate([1, 1, 1], [1, 0, 0], "logit")
    c = evaluate([0, 0, 1], [1, 0, 0], "tree")
    table = compare([a, b, c])
    assert list(table.index) == ["accuracy", "precision", "recall", "f_measure"]
    assert ("tree", "persist") in table.columns
    assert ("tree#2", "decay") in table.columns
    assert table[("logit", "persist")]["recall"] == 1.0
    assert "tree#2" in render_comparison(table)
    with pytest.raises(ValueError):
        compare([])


def test_bayes_rate():
    """Test the mean of max(p, 1 - p)"""
    assert bayes_rate([0.5, 0.9, 0.2]) == pytest.approx((0.5 + 0.9 + 0.8) / 3)
    with pytest.raises(ValueError):
        bayes_rate([])
