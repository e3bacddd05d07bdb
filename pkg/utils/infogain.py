"""
Entropy, conditional entropy and information gain of features with respect
to the persist/decay class. All logarithms are base 2.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from models.edge import FEATURE_NAMES, feature_group
from utils.edge_features import as_feature_frame
from utils.errors import DataError

logger = logging.getLogger(__name__)

GAIN_MODES = ("weighted", "paper")
STRATEGIES = ("best-binary-split", "equal-frequency")

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class ClassDistribution:
    n_persist: int
    n_decay: int

    def __post_init__(self):
        if self.n_persist < 0 or self.n_decay < 0:
            raise ValueError(f"Class counts must be non-negative: {self}")

    @property
    def total(self):
        return self.n_persist + self.n_decay

    @classmethod
    def from_labels(cls, labels):
        labels = np.asarray(labels)
        persist = int(np.count_nonzero(labels == 1))
        return cls(n_persist=persist, n_decay=int(labels.size - persist))


def _binary_entropy(p):
    """Vectorized H(p) in bits with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    return (entr(p) + entr(1.0 - p)) / _LN2


def entropy(dist):
    """
    Class entropy H = -p log p - q log q in bits

    Args:
        dist: ClassDistribution with a positive total

    Returns:
        float: entropy in [0, 1]
    """
    if dist.total == 0:
        raise ValueError("Entropy of an empty class distribution is undefined")
    return float(_binary_entropy(dist.n_persist / dist.total))


def conditional_entropy(partition, mode="weighted"):
    """
    Entropy of the class given a partition of the instances

    ``weighted`` returns sum_k P(F=k) H_k; ``paper`` returns the unweighted
    mean of the bucket entropies, sum_k H_k / |K|.

    Args:
        partition: mapping bucket key -> ClassDistribution (all non-empty)
        mode: "weighted" or "paper"

    Returns:
        float: bits
    """
    if mode not in GAIN_MODES:
        raise ValueError(f"Unknown gain mode '{mode}' (expected one of {GAIN_MODES})")
    if not partition:
        raise ValueError("Conditional entropy needs at least one bucket")
    buckets = list(partition.values())
    if any(bucket.total == 0 for bucket in buckets):
        raise ValueError("Every bucket of the partition must be non-empty")
    entropies = [entropy(bucket) for bucket in buckets]
    if mode == "paper":
        return float(sum(entropies) / len(buckets))
    total = sum(bucket.total for bucket in buckets)
    return float(sum(bucket.total / total * h for bucket, h in zip(buckets, entropies)))


def partition_by_value(values, classes):
    """Group instances by exact feature value into ClassDistributions."""
    values = np.asarray(values)
    classes = np.asarray(classes)
    partition = {}
    keys, inverse = np.unique(values, return_inverse=True)
    inverse = inverse.reshape(-1)
    for index, key in enumerate(keys.tolist()):
        members = classes[inverse == index]
        partition[key] = ClassDistribution.from_labels(members)
    return partition


def info_gain(values, classes, mode="weighted", discretization=None):
    """
    Decrease in class entropy from conditioning on a feature

    Without a discretization each distinct value is its own bucket.

    Args:
        values: feature values
        classes: 0/1 labels, same length
        mode: "weighted" or "paper"
        discretization: optional Discretization mapping values to bins

    Returns:
        float: gain in bits
    """
    values = np.asarray(values)
    classes = np.asarray(classes)
    if values.shape[0] != classes.shape[0]:
        raise ValueError(f"Length mismatch: {values.shape[0]} values vs {classes.shape[0]} classes")
    if classes.size == 0:
        raise ValueError("Information gain of an empty sample is undefined")
    if discretization is not None:
        values = discretization.assign(values)
    base = entropy(ClassDistribution.from_labels(classes))
    return base - conditional_entropy(partition_by_value(values, classes), mode)


@dataclass(frozen=True)
class Discretization:
    """
    Cut points mapping numeric values to bins: bin k holds thresholds[k-1] < v <= thresholds[k]
    """

    strategy: str
    thresholds: tuple
    gain: float

    def assign(self, values):
        return np.searchsorted(np.asarray(self.thresholds, dtype=float), np.asarray(values, dtype=float), side="left")

    @property
    def n_bins(self):
        return len(self.thresholds) + 1

    def to_dict(self):
        return {"strategy": self.strategy, "thresholds": list(self.thresholds), "gain": self.gain}


def best_threshold(values, classes, min_bucket=1):
    """
    Exhaustive search for the binary split with maximal weighted information gain

    Candidates are midpoints between consecutive distinct sorted values;
    ties go to the lowest threshold.

    Args:
        values: numeric feature values
        classes: 0/1 labels
        min_bucket: minimum number of instances on each side

    Returns:
        tuple: (threshold, gain), or (None, 0.0) when no admissible split exists
    """
    values = np.asarray(values, dtype=float)
    classes = np.asarray(classes)
    n = values.size
    if n < 2:
        return None, 0.0
    order = np.argsort(values, kind="mergesort")
    sorted_values = values[order]
    positives = np.cumsum(classes[order] == 1)

    left_size = np.arange(1, n)
    boundary = sorted_values[:-1] < sorted_values[1:]
    admissible = boundary & (left_size >= min_bucket) & (n - left_size >= min_bucket)
    if not admissible.any():
        return None, 0.0

    cut = np.flatnonzero(admissible)
    n_left = left_size[cut].astype(float)
    n_right = n - n_left
    pos_left = positives[cut].astype(float)
    pos_right = positives[-1] - pos_left
    conditional = (
        n_left / n * _binary_entropy(pos_left / n_left)
        + n_right / n * _binary_entropy(pos_right / n_right)
    )
    base = _binary_entropy(positives[-1] / n)
    gains = base - conditional
    best = int(np.argmax(gains))
    k = cut[best]
    threshold = (sorted_values[k] + sorted_values[k + 1]) / 2.0
    return float(threshold), max(float(gains[best]), 0.0)


def discretize_numeric(values, classes, strategy="best-binary-split", bins=4, min_bucket=1):
    """
    Choose bins for a numeric feature

    Args:
        values: numeric feature values
        classes: 0/1 labels
        strategy: "best-binary-split" or "equal-frequency"
        bins: number of quantile bins for equal-frequency
        min_bucket: minimum instances on each side of a best-binary-split cut

    Returns:
        Discretization
    """
    values = np.asarray(values, dtype=float)
    classes = np.asarray(classes)
    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown discretization '{strategy}' (expected one of {STRATEGIES})")
    if np.unique(values).size < 2:
        return Discretization(strategy, (), 0.0)

    if strategy == "best-binary-split":
        threshold, gain = best_threshold(values, classes, min_bucket=min_bucket)
        if threshold is None:
            return Discretization(strategy, (), 0.0)
        return Discretization(strategy, (threshold,), gain)

    if bins < 2:
        raise ValueError(f"equal-frequency needs at least 2 bins, got {bins}")
    quantiles = np.quantile(values, np.arange(1, bins) / bins)
    # Cuts at or above the maximum would leave an empty top bin.
    cuts = tuple(float(q) for q in np.unique(quantiles) if q < values.max())
    draft = Discretization(strategy, cuts, 0.0)
    gain = info_gain(values, classes, discretization=draft)
    return Discretization(strategy, cuts, gain)


@dataclass(frozen=True)
class RankedFeature:
    name: str
    gain: float
    discretization: Discretization

    def to_dict(self):
        return {
            "feature": self.name,
            "group": feature_group(self.name),
            "gain": self.gain,
            "discretization": self.discretization.to_dict(),
        }


@dataclass(frozen=True)
class FeatureRanking:
    """Features ordered by decreasing information gain"""

    entries: tuple
    mode: str
    class_entropy: float

    def names(self):
        return [entry.name for entry in self.entries]

    def top(self):
        return self.entries[0]

    def to_dict(self):
        return {
            "mode": self.mode,
            "class_entropy": self.class_entropy,
            "ranking": [entry.to_dict() for entry in self.entries],
        }


def rank_features(edges, mode="weighted", strategy="best-binary-split", bins=4, min_bucket=1,
                  feature_names=FEATURE_NAMES, class_column="class"):
    """
    Score every feature by information gain about the class and sort

    Args:
        edges: DataFrame with feature and class columns, or sequence of LabeledEdge
        mode: "weighted" or "paper"
        strategy: discretization strategy applied to every feature
        bins: bins for equal-frequency
        min_bucket: smallest side of a binary cut; pass the tree's min_leaf_size
            to score features the way the root split does
        feature_names: features to score

    Returns:
        FeatureRanking: descending by gain, ties kept in feature order
    """
    frame = as_feature_frame(edges)
    if len(frame) == 0:
        raise DataError("Cannot rank features on an empty edge set")
    classes = frame[class_column].to_numpy()
    entries = []
    for name in feature_names:
        values = frame[name].to_numpy(dtype=float)
        discretization = discretize_numeric(values, classes, strategy, bins, min_bucket)
        gain = info_gain(values, classes, mode, discretization)
        entries.append(RankedFeature(name, gain, discretization))
    entries.sort(key=lambda entry: -entry.gain)
    ranking = FeatureRanking(
        entries=tuple(entries),
        mode=mode,
        class_entropy=entropy(ClassDistribution.from_labels(classes)),
    )
    logger.info("Top feature by information gain: %s (%.5f bits)", ranking.top().name, ranking.top().gain)
    return ranking
