"""
Decision-tree induction with axis-parallel numeric splits chosen by
weighted information gain.
"""

import logging

import numpy as np
import pandas as pd

from models.decision_tree import DecisionTree, Leaf, Split, TreeConfig
from models.edge import FEATURE_NAMES
from utils.edge_features import as_feature_frame
from utils.errors import DataError
from utils.infogain import best_threshold

logger = logging.getLogger(__name__)


def _best_split(X, y, feature_names, min_leaf_size):
    """Best (feature index, threshold, gain); earlier features win exact ties."""
    best = (None, None, 0.0)
    for index in range(len(feature_names)):
        threshold, gain = best_threshold(X[:, index], y, min_bucket=min_leaf_size)
        if threshold is not None and gain > best[2]:
            best = (index, threshold, gain)
    return best


def _grow(X, y, feature_names, cfg, depth):
    n_persist = int(np.count_nonzero(y == 1))
    leaf = Leaf(n_persist=n_persist, n_decay=int(y.size - n_persist))
    if n_persist in (0, y.size):
        return leaf
    if cfg.max_depth is not None and depth >= cfg.max_depth:
        return leaf
    if y.size < 2 * cfg.min_leaf_size:
        return leaf

    index, threshold, gain = _best_split(X, y, feature_names, cfg.min_leaf_size)
    if index is None or gain < cfg.min_gain:
        return leaf

    logger.debug(
        "%sdepth %d: split %s <= %g (gain %.5f, n=%d)",
        "  " * depth, depth, feature_names[index], threshold, gain, y.size,
    )
    goes_left = X[:, index] <= threshold
    return Split(
        feature=feature_names[index],
        threshold=threshold,
        left=_grow(X[goes_left], y[goes_left], feature_names, cfg, depth + 1),
        right=_grow(X[~goes_left], y[~goes_left], feature_names, cfg, depth + 1),
        gain=gain,
    )


def train_tree(edges, cfg=None, feature_names=FEATURE_NAMES, class_column="class"):
    """
    Grow a decision tree on labeled edges

    At every node the split with the largest weighted information gain over all
    (feature, threshold) candidates is taken; ties go to the earlier feature,
    then the lower threshold. Growth stops at pure nodes, at ``max_depth``,
    when no split leaves ``min_leaf_size`` instances on both sides, or when
    the best gain is below ``min_gain``.

    Args:
        edges: DataFrame with feature and class columns, or sequence of LabeledEdge
        cfg: TreeConfig, defaults if None
        feature_names: feature columns to split on
        class_column: name of the 0/1 class column

    Returns:
        DecisionTree
    """
    cfg = cfg or TreeConfig()
    frame = edges if isinstance(edges, pd.DataFrame) else as_feature_frame(edges)
    if len(frame) == 0:
        raise DataError("Cannot train a tree on an empty training set")
    feature_names = tuple(feature_names)
    X = frame[list(feature_names)].to_numpy(dtype=float)
    y = frame[class_column].to_numpy().astype(int)
    if not np.all(np.isfinite(X)):
        raise DataError("Training features contain non-finite values")

    root = _grow(X, y, feature_names, cfg, depth=0)
    tree = DecisionTree(root=root, feature_names=feature_names, config=cfg)
    logger.info(
        "Trained tree on %d edges: %d leaves, depth %d, root %s",
        len(frame),
        tree.n_leaves(),
        tree.depth(),
        root.feature if isinstance(root, Split) else "(leaf)",
    )
    return tree


def predict(tree, features):
    """
    Classify one feature vector

    Args:
        tree: DecisionTree
        features: mapping feature name -> value, or EdgeFeatureVector

    Returns:
        tuple: (class, persist probability) of the reached leaf
    """
    return tree.predict_one(features)


def describe_tree(tree, max_nodes=None):
    """
    Render the tree as one rule per leaf

    Args:
        tree: DecisionTree
        max_nodes: render at most this many leaves (depth-first order)

    Returns:
        list of dict: rule text, conditions, instance count, persist probability
    """
    rendered = []
    for conditions, leaf in tree.leaves()[:max_nodes]:
        rendered.append(
            {
                "rule": tree.render_rule(conditions, leaf),
                "conditions": [
                    {"feature": feature, "op": op, "threshold": threshold}
                    for feature, op, threshold in conditions
                ],
                "n": leaf.total,
                "persist_probability": leaf.persist_probability,
                "predicted_class": leaf.predicted_class,
            }
        )
    return rendered
