"""
Tests for decision-tree induction, prediction and rule rendering
"""

import json

import numpy as np
import pandas as pd
import pytest

from models.decision_tree import DecisionTree, Leaf, Split, TreeConfig
from models.edge import DECAY, FEATURE_NAMES, PERSIST
from utils.errors import DataError
from utils.infogain import info_gain, rank_features
from utils.tree_classifier import describe_tree, predict, train_tree


def grid(size):
    """Every integer point of a size x size square with class x > 5 and y > 10"""
    xs, ys = np.meshgrid(np.arange(size), np.arange(size))
    frame = pd.DataFrame({"x": xs.ravel(), "y": ys.ravel()})
    frame["class"] = ((frame["x"] > 5) & (frame["y"] > 10)).astype(int)
    return frame


@pytest.fixture
def toy_tree():
    """
    Fixture providing a tree trained on the 21 x 21 grid
    """
    return train_tree(grid(21), TreeConfig(min_leaf_size=1, min_gain=0.0), feature_names=("x", "y"))


def test_toy_tree_structure(toy_tree):
    """Test the rectangle is carved with y first, then x"""
    root = toy_tree.root
    assert isinstance(root, Split)
    assert (root.feature, root.threshold) == ("y", 10.5)
    assert root.left == Leaf(n_persist=0, n_decay=231)
    assert (root.right.feature, root.right.threshold) == ("x", 5.5)
    assert toy_tree.depth() == 2
    assert toy_tree.n_leaves() == 3


def test_toy_tree_reproduces_the_region(toy_tree):
    """Test the tree labels a larger grid exactly like the generating rule"""
    frame = grid(100)
    assert np.array_equal(toy_tree.predict(frame), frame["class"].to_numpy())
    assert predict(toy_tree, {"x": 6, "y": 11}) == (PERSIST, 1.0)
    assert predict(toy_tree, {"x": 6, "y": 9}) == (DECAY, 0.0)


def test_root_split_matches_an_exhaustive_search():
    """Test the root split has the largest gain over every feature and midpoint"""
    rng = np.random.default_rng(7)
    for _ in range(10):
        frame = pd.DataFrame({"a": rng.integers(0, 6, size=12), "b": rng.random(12)})
        frame["class"] = rng.integers(0, 2, size=12)
        if frame["class"].nunique() < 2:
            continue
        best = 0.0
        for name in ("a", "b"):
            values = np.unique(frame[name])
            for threshold in (values[:-1] + values[1:]) / 2:
                best = max(best, info_gain(frame[name] <= threshold, frame["class"]))
        tree = train_tree(frame, TreeConfig(min_leaf_size=1, min_gain=1e-9), feature_names=("a", "b"))
        if best < 1e-9:
            assert isinstance(tree.root, Leaf)
            continue
        root = tree.root
        assert root.gain == pytest.approx(best, abs=1e-12)
        assert info_gain(frame[root.feature] <= root.threshold, frame["class"]) == pytest.approx(best, abs=1e-12)


def test_root_feature_is_the_top_ranked_feature(feature_table):
    """Test the root splits on the feature with the largest binary-split gain"""
    frame = feature_table(n=500, seed=8, noise=3.0)
    tree = train_tree(frame, TreeConfig(min_leaf_size=1))
    assert tree.root.feature == rank_features(frame).top().name == "c_ij"


def test_ranking_with_the_leaf_size_agrees_with_the_root():
    """Test the ranking matches the root once single-instance cuts are excluded the same way"""
    frame = pd.DataFrame(0.0, index=range(8), columns=list(FEATURE_NAMES))
    # c_ij isolates one decaying edge at each end; c_ji puts both decays in its lower five
    frame["c_ij"] = [0, 1, 2, 3, 4, 5, 6, 7]
    frame["c_ji"] = [0, 1, 2, 3, 5, 6, 7, 4]
    frame["class"] = [0, 1, 1, 1, 1, 1, 1, 0]

    loose = {entry.name: entry.gain for entry in rank_features(frame).entries}
    assert loose["c_ij"] == pytest.approx(loose["c_ji"], abs=1e-12)
    assert loose["c_ij"] == pytest.approx(0.2936, abs=1e-4)

    tree = train_tree(frame, TreeConfig(min_leaf_size=2))
    ranking = rank_features(frame, min_bucket=2)
    assert tree.root.feature == ranking.top().name == "c_ji"
    assert tree.root.threshold == ranking.top().discretization.thresholds[0] == 4.5
    assert ranking.top().gain == pytest.approx(tree.root.gain, abs=1e-12)


def test_monotone_transform_leaves_predictions_unchanged(feature_table):
    """Test a strictly increasing rescaling of every feature yields the same partition"""
    frame = feature_table(n=300, seed=9, noise=2.0)
    transformed = frame.copy()
    for name in FEATURE_NAMES:
        transformed[name] = frame[name] ** 3 + 2 * frame[name]
    a = train_tree(frame)
    b = train_tree(transformed)
    assert np.array_equal(a.predict(frame), b.predict(transformed))
    assert [leaf for _, leaf in a.leaves()] == [leaf for _, leaf in b.leaves()]


def test_stopping_rules(feature_table):
    """Test depth and leaf-size limits hold in every leaf"""
    frame = feature_table(n=400, seed=10, noise=4.0)
    tree = train_tree(frame, TreeConfig(min_leaf_size=15, max_depth=3, min_gain=0.0))
    assert tree.depth() <= 3
    assert all(leaf.total >= 15 for _, leaf in tree.leaves())
    assert sum(leaf.total for _, leaf in tree.leaves()) == 400

    stump = train_tree(frame, TreeConfig(max_depth=0))
    assert isinstance(stump.root, Leaf)
    assert stump.n_leaves() == 1


def test_pure_training_set_is_a_single_leaf(feature_table):
    """Test a one-class sample cannot be split"""
    frame = feature_table(n=50, seed=11)
    frame["class"] = 1
    tree = train_tree(frame)
    assert tree.root == Leaf(n_persist=50, n_decay=0)
    assert np.all(tree.predict(frame) == PERSIST)


def test_tied_leaf_predicts_persistence():
    """Test an exact tie in a leaf predicts the persist class"""
    assert Leaf(n_persist=3, n_decay=3).predicted_class == PERSIST
    assert Leaf(n_persist=2, n_decay=3).predicted_class == DECAY


def test_batch_and_single_predictions_agree(feature_table):
    """Test predict and predict_one give the same classes and probabilities"""
    frame = feature_table(n=200, seed=12, noise=2.0)
    tree = train_tree(frame)
    classes = tree.predict(frame)
    probabilities = tree.predict_proba(frame)
    for index, row in frame.head(50).iterrows():
        assert tree.predict_one(row) == (classes[index], probabilities[index])
    assert np.all((probabilities >= 0.0) & (probabilities <= 1.0))


def test_json_round_trip(feature_table):
    """Test a serialized tree loads back to an identical tree"""
    tree = train_tree(feature_table(n=200, seed=13, noise=2.0), TreeConfig(max_depth=4))
    loaded = DecisionTree.from_dict(json.loads(json.dumps(tree.to_dict())))
    assert loaded == tree
    with pytest.raises(DataError):
        DecisionTree.from_dict({"model_type": "logit"})


def test_describe_tree(toy_tree):
    """Test one rule per leaf in depth-first order"""
    rules = describe_tree(toy_tree)
    assert len(rules) == 3
    assert rules[0]["rule"].startswith("y <= 10.5 →")
    assert rules[2]["conditions"] == [
        {"feature": "y", "op": ">", "threshold": 10.5},
        {"feature": "x", "op": ">", "threshold": 5.5},
    ]
    assert rules[2]["predicted_class"] == PERSIST
    assert sum(rule["n"] for rule in rules) == 441
    assert len(describe_tree(toy_tree, max_nodes=2)) == 2


def test_training_input_errors(feature_table):
    """Test empty and non-finite training sets are data errors"""
    frame = feature_table(n=20)
    with pytest.raises(DataError):
        train_tree(frame.iloc[:0])
    frame.loc[3, "p_ij"] = np.nan
    with pytest.raises(DataError):
        train_tree(frame)
