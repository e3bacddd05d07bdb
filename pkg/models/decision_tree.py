from dataclasses import dataclass

import numpy as np

from models.edge import CLASS_NAMES, DECAY, PERSIST
from utils.errors import DataError, UsageError


@dataclass(frozen=True)
class TreeConfig:
    """
    Stopping rules for tree induction
    """

    min_leaf_size: int = 2
    max_depth: int = None  # unlimited
    min_gain: float = 0.001  # bits
    criterion: str = "info_gain"

    def __post_init__(self):
        if self.min_leaf_size < 1:
            raise UsageError(f"min_leaf_size must be at least 1, got {self.min_leaf_size}")
        if self.max_depth is not None and self.max_depth < 0:
            raise UsageError(f"max_depth must be non-negative, got {self.max_depth}")
        if self.criterion != "info_gain":
            raise UsageError(f"Only the info_gain criterion is supported, got '{self.criterion}'")

    @classmethod
    def from_dict(cls, data):
        max_depth = data.get("max_depth")
        return cls(
            min_leaf_size=int(data.get("min_leaf_size", 2)),
            max_depth=None if max_depth in (None, "", -1) else int(max_depth),
            min_gain=float(data.get("min_gain", 0.001)),
            criterion=data.get("criterion", "info_gain"),
        )

    def to_dict(self):
        return {
            "min_leaf_size": self.min_leaf_size,
            "max_depth": self.max_depth,
            "min_gain": self.min_gain,
            "criterion": self.criterion,
        }


@dataclass(frozen=True)
class Leaf:
    n_persist: int
    n_decay: int

    @property
    def total(self):
        return self.n_persist + self.n_decay

    @property
    def persist_probability(self):
        return self.n_persist / self.total if self.total else 0.0

    @property
    def predicted_class(self):
        # Majority class; an exact tie predicts persistence.
        return PERSIST if self.n_persist >= self.n_decay else DECAY

    def to_dict(self):
        return {"leaf": {"n_persist": self.n_persist, "n_decay": self.n_decay}}


@dataclass(frozen=True)
class Split:
    """Numeric split: values <= threshold go left, greater values go right"""

    feature: str
    threshold: float
    left: object
    right: object
    gain: float = 0.0

    def to_dict(self):
        return {
            "split": {
                "feature": self.feature,
                "threshold": self.threshold,
                "gain": self.gain,
                "left": self.left.to_dict(),
                "right": self.right.to_dict(),
            }
        }


def node_from_dict(data):
    if "leaf" in data:
        leaf = data["leaf"]
        return Leaf(n_persist=int(leaf["n_persist"]), n_decay=int(leaf["n_decay"]))
    if "split" in data:
        split = data["split"]
        return Split(
            feature=split["feature"],
            threshold=float(split["threshold"]),
            left=node_from_dict(split["left"]),
            right=node_from_dict(split["right"]),
            gain=float(split.get("gain", 0.0)),
        )
    raise DataError(f"Unrecognized tree node: {sorted(data)}")


def _format_threshold(value):
    return f"{value:.6g}"


@dataclass(frozen=True)
class DecisionTree:
    """
    A trained binary decision tree over named numeric features
    """

    root: object
    feature_names: tuple
    config: TreeConfig = TreeConfig()

    def _walk(self, row):
        node = self.root
        while isinstance(node, Split):
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node

    def leaf_for(self, features):
        """
        Follow the splits down to a leaf

        Args:
            features: mapping feature name -> value (dict, Series or EdgeFeatureVector)

        Returns:
            Leaf
        """
        if hasattr(features, "as_dict"):
            features = features.as_dict()
        return self._walk(features)

    def predict_one(self, features):
        leaf = self.leaf_for(features)
        return leaf.predicted_class, leaf.persist_probability

    def predict_proba(self, frame):
        """Persist probability for every row of a feature table."""
        columns = {name: frame[name].to_numpy(dtype=float) for name in self.feature_names}
        probabilities = np.empty(len(frame))
        for index in range(len(frame)):
            row = {name: column[index] for name, column in columns.items()}
            probabilities[index] = self._walk(row).persist_probability
        return probabilities

    def predict(self, frame):
        """Majority class of the reached leaf for every row of a feature table."""
        columns = {name: frame[name].to_numpy(dtype=float) for name in self.feature_names}
        classes = np.empty(len(frame), dtype=int)
        for index in range(len(frame)):
            row = {name: column[index] for name, column in columns.items()}
            classes[index] = self._walk(row).predicted_class
        return classes

    def leaves(self):
        """
        Enumerate leaves depth-first, left before right

        Returns:
            list of (conditions, Leaf); each condition is (feature, "<=" or ">", threshold)
        """
        found = []
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if isinstance(node, Leaf):
                found.append((path, node))
                continue
            stack.append((node.right, path + ((node.feature, ">", node.threshold),)))
            stack.append((node.left, path + ((node.feature, "<=", node.threshold),)))
        return found

    def depth(self):
        return max((len(path) for path, _ in self.leaves()), default=0)

    def n_leaves(self):
        return len(self.leaves())

    def render_rule(self, conditions, leaf):
        clause = " AND ".join(
            f"{feature} {op} {_format_threshold(threshold)}" for feature, op, threshold in conditions
        ) or "(all)"
        outcome = CLASS_NAMES[leaf.predicted_class]
        return f"{clause} → {outcome} (p={leaf.persist_probability:.2f}, n={leaf.total})"

    def to_dict(self):
        return {
            "model_type": "tree",
            "feature_names": list(self.feature_names),
            "config": self.config.to_dict(),
            "root": self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("model_type") != "tree":
            raise DataError(f"Not a tree model (model_type={data.get('model_type')!r})")
        return cls(
            root=node_from_dict(data["root"]),
            feature_names=tuple(data["feature_names"]),
            config=TreeConfig.from_dict(data.get("config", {})),
        )
