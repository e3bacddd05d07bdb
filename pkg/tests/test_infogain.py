"""
Tests for entropy, information gain, discretization and feature ranking
"""

import numpy as np
import pytest

from models.edge import FEATURE_NAMES
from utils.errors import DataError
from utils.infogain import (
    ClassDistribution,
    Discretization,
    best_threshold,
    conditional_entropy,
    discretize_numeric,
    entropy,
    info_gain,
    partition_by_value,
    rank_features,
)


def two_bucket_sample():
    """Two equal buckets, 90/10 and 10/90 persist/decay"""
    values = np.array(["a"] * 100 + ["b"] * 100)
    classes = np.array([1] * 90 + [0] * 10 + [1] * 10 + [0] * 90)
    return values, classes


def test_entropy_endpoints():
    """Test a balanced class has one bit and a pure class none"""
    assert entropy(ClassDistribution(50, 50)) == 1.0
    assert entropy(ClassDistribution(100, 0)) == 0.0
    assert entropy(ClassDistribution(0, 7)) == 0.0
    assert entropy(ClassDistribution(90, 10)) == pytest.approx(0.4690, abs=1e-4)
    with pytest.raises(ValueError):
        entropy(ClassDistribution(0, 0))


def test_entropy_is_symmetric():
    """Test H(p) = H(1 - p)"""
    for persist in range(0, 101, 7):
        assert entropy(ClassDistribution(persist, 100 - persist)) == pytest.approx(
            entropy(ClassDistribution(100 - persist, persist)), abs=1e-12
        )


def test_worked_example_conditional_entropy():
    """Test the two-bucket example in both the weighted and unweighted forms"""
    partition = {"a": ClassDistribution(90, 10), "b": ClassDistribution(10, 90)}
    assert conditional_entropy(partition) == pytest.approx(0.4690, abs=1e-4)
    assert conditional_entropy(partition, mode="paper") == pytest.approx(0.4690, abs=1e-4)


def test_worked_example_gain():
    """Test the two-value feature gives a gain of 0.53 bits"""
    values, classes = two_bucket_sample()
    gain = info_gain(values, classes)
    assert round(gain, 2) == 0.53
    assert gain == pytest.approx(1.0 - entropy(ClassDistribution(90, 10)), abs=1e-12)


def test_vacuous_conditioning():
    """Test a single bucket leaves the class entropy unchanged in both modes"""
    dist = ClassDistribution(30, 70)
    for mode in ("weighted", "paper"):
        assert conditional_entropy({"all": dist}, mode) == pytest.approx(entropy(dist))
    with pytest.raises(ValueError):
        conditional_entropy({})
    with pytest.raises(ValueError):
        conditional_entropy({"all": dist}, mode="ratio")


def test_modes_differ_on_unequal_buckets():
    """Test the unweighted mean ignores bucket sizes"""
    partition = {"big": ClassDistribution(80, 20), "small": ClassDistribution(1, 1)}
    weighted = conditional_entropy(partition)
    unweighted = conditional_entropy(partition, mode="paper")
    h_big = entropy(ClassDistribution(80, 20))
    assert weighted == pytest.approx((100 * h_big + 2 * 1.0) / 102)
    assert unweighted == pytest.approx((h_big + 1.0) / 2)


def test_perfect_and_useless_features():
    """Test gain equals the class entropy for a copy of the class and zero for a constant"""
    rng = np.random.default_rng(0)
    classes = rng.integers(0, 2, size=500)
    h = entropy(ClassDistribution.from_labels(classes))
    assert info_gain(classes, classes) == pytest.approx(h)
    assert info_gain(np.zeros(500), classes) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        info_gain([1, 2], [1])


def test_weighted_gain_properties():
    """Test relabel invariance, the class-entropy ceiling and refinement monotonicity"""
    rng = np.random.default_rng(1)
    for _ in range(20):
        values = rng.integers(0, 6, size=300)
        classes = (rng.random(300) < 0.2 + 0.1 * values).astype(int)
        h = entropy(ClassDistribution.from_labels(classes))
        gain = info_gain(values, classes)
        relabeled = info_gain((values * 7 + 3) % 11, classes)
        coarse = info_gain(values // 2, classes)
        assert gain == pytest.approx(relabeled, abs=1e-12)
        assert 0.0 <= gain <= h + 1e-12
        assert coarse <= gain + 1e-12


def test_partition_by_value():
    """Test instances are grouped by exact value"""
    partition = partition_by_value([1, 2, 1, 2, 3], [1, 0, 1, 1, 0])
    assert partition == {1: ClassDistribution(2, 0), 2: ClassDistribution(1, 1), 3: ClassDistribution(0, 1)}


def test_separable_threshold():
    """Test a perfectly separable feature splits between the classes with one bit of gain"""
    threshold, gain = best_threshold([1, 2, 8, 9], [0, 0, 1, 1])
    assert 2 < threshold < 8
    assert gain == pytest.approx(1.0)

    found = discretize_numeric([1, 2, 8, 9], [0, 0, 1, 1])
    assert found.thresholds == (threshold,)
    assert found.gain == pytest.approx(1.0)


def test_planted_threshold_is_recovered():
    """Test the recovered cut lies in the gap that holds the planted one"""
    rng = np.random.default_rng(2)
    values = rng.integers(0, 100, size=2000)
    classes = (values > 37).astype(int)
    flip = rng.random(2000) < 0.05
    classes[flip] = 1 - classes[flip]
    threshold, _ = best_threshold(values, classes)
    assert 37 <= threshold <= 38


def test_noise_feature_has_tiny_gain():
    """Test an independent uniform feature carries almost no information"""
    rng = np.random.default_rng(3)
    found = discretize_numeric(rng.random(10_000), rng.integers(0, 2, size=10_000))
    assert found.gain < 0.01


def test_constant_values_give_a_single_bin():
    """Test all-identical values cannot be split"""
    found = discretize_numeric([4, 4, 4], [0, 1, 1])
    assert found.thresholds == ()
    assert found.gain == 0.0
    assert found.n_bins == 1
    assert best_threshold([5], [1]) == (None, 0.0)


def test_equal_frequency_bins():
    """Test quantile bins cover the values and assign by upper-inclusive cuts"""
    values = np.arange(1, 101, dtype=float)
    classes = (values > 50).astype(int)
    found = discretize_numeric(values, classes, strategy="equal-frequency", bins=4)
    assert found.n_bins == 4
    assert np.bincount(found.assign(values)).tolist() == [25, 25, 25, 25]
    assert found.gain == pytest.approx(1.0)
    assert Discretization("manual", (2.0,), 0.0).assign([2.0, 2.5]).tolist() == [0, 1]
    with pytest.raises(ValueError):
        discretize_numeric(values, classes, strategy="equal-frequency", bins=1)
    with pytest.raises(ValueError):
        discretize_numeric(values, classes, strategy="chi-merge")


def test_ranking_puts_the_planted_feature_first(feature_table):
    """Test the only informative feature tops the ranking and noise ranks below it"""
    ranking = rank_features(feature_table(n=600, seed=5, noise=2.0))
    assert ranking.top().name == "c_ij"
    assert sorted(ranking.names()) == sorted(FEATURE_NAMES)
    gains = [entry.gain for entry in ranking.entries]
    assert gains == sorted(gains, reverse=True)
    assert all(gain >= 0.0 for gain in gains)
    assert ranking.entries[1].gain < ranking.top().gain / 2

    payload = ranking.to_dict()
    assert payload["ranking"][0]["group"] == "dyad"
    assert payload["ranking"][0]["discretization"]["strategy"] == "best-binary-split"


def test_ranking_in_unweighted_mode(feature_table):
    """Test the unweighted mode still ranks the planted feature first"""
    ranking = rank_features(feature_table(n=600, seed=6), mode="paper", strategy="equal-frequency", bins=4)
    assert ranking.top().name == "c_ij"
    assert ranking.mode == "paper"


def test_ranking_needs_edges(feature_table):
    """Test an empty edge set cannot be ranked"""
    with pytest.raises(DataError):
        rank_features(feature_table(n=10).iloc[:0])
