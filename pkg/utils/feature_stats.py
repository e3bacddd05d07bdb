"""
Descriptive statistics over extracted features: ranges, medians, empirical
CDFs and the Spearman correlation matrix.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from models.edge import FEATURE_GROUPS, FEATURE_NAMES, feature_group
from utils.edge_features import as_feature_frame
from utils.errors import DataError

logger = logging.getLogger(__name__)


def lower_median(values):
    """
    Median that picks the lower of the two middle values for even counts

    Args:
        values: non-empty sequence of numbers

    Returns:
        the middle order statistic (an element of ``values``)
    """
    ordered = np.sort(np.asarray(values))
    if ordered.size == 0:
        raise ValueError("Cannot take the median of an empty sequence")
    return ordered[(ordered.size - 1) // 2].item()


def empirical_cdf(values):
    """
    Distinct sorted values with the fraction of observations at or below each

    Returns:
        pandas.DataFrame with columns value, cdf (non-decreasing, last value 1.0)
    """
    distinct, counts = np.unique(np.asarray(values), return_counts=True)
    cumulative = np.cumsum(counts) / counts.sum()
    return pd.DataFrame({"value": distinct, "cdf": cumulative})


@dataclass(frozen=True)
class FeatureStat:
    minimum: float
    maximum: float
    median: float
    mean: float

    def to_dict(self):
        return {"min": self.minimum, "max": self.maximum, "median": self.median, "mean": self.mean}


@dataclass
class FeatureSummary:
    """Per-feature order statistics and CDF points for one feature table"""

    n_edges: int
    stats: dict
    cdf: dict = field(repr=False)

    def to_dict(self):
        grouped = {}
        for group, members in FEATURE_GROUPS.items():
            grouped[group] = {name: self.stats[name].to_dict() for name in members if name in self.stats}
        return {"n_edges": self.n_edges, "features": grouped}


def summarize(features, feature_names=FEATURE_NAMES):
    """
    Range, lower median and mean of every feature

    Args:
        features: DataFrame or sequence of EdgeFeatureVector / LabeledEdge
        feature_names: columns to summarize

    Returns:
        FeatureSummary
    """
    frame = as_feature_frame(features)
    if len(frame) == 0:
        raise DataError("Cannot summarize an empty feature set")
    stats = {}
    cdf = {}
    for name in feature_names:
        column = frame[name].to_numpy()
        stats[name] = FeatureStat(
            minimum=column.min().item(),
            maximum=column.max().item(),
            median=lower_median(column),
            mean=float(column.mean()),
        )
        cdf[name] = empirical_cdf(column)
    logger.info("Summarized %d features over %d edges", len(stats), len(frame))
    return FeatureSummary(n_edges=len(frame), stats=stats, cdf=cdf)


def write_cdf_points(summary, directory):
    """
    Write one ``<feature>.csv`` of (value, cdf) points per feature

    Returns:
        list of written paths
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, points in summary.cdf.items():
        path = directory / f"{name}.csv"
        points.to_csv(path, index=False)
        written.append(path)
    return written


def _centered_ranks(column):
    ranks = rankdata(column, method="average")
    return ranks - ranks.mean()


def spearman(x, y):
    """
    Tie-aware Spearman correlation: Pearson correlation of average ranks

    Returns:
        float: rho in [-1, 1], or NaN when either variable is constant
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"Length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("Spearman correlation needs at least two observations")
    return _rank_pearson(_centered_ranks(x), _centered_ranks(y))


def _rank_pearson(a, b):
    denominator = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denominator == 0:
        return float("nan")
    return float(np.clip(np.dot(a, b) / denominator, -1.0, 1.0))


def spearman_matrix(features, feature_names=FEATURE_NAMES):
    """
    Pairwise Spearman correlations between all features

    A constant feature has undefined correlations, recorded as NaN in its
    whole row and column (including the diagonal).

    Args:
        features: DataFrame or sequence of EdgeFeatureVector / LabeledEdge
        feature_names: columns to correlate

    Returns:
        pandas.DataFrame: symmetric matrix indexed by feature name
    """
    frame = as_feature_frame(features)
    if len(frame) < 2:
        raise DataError("Spearman correlation needs at least two edges")
    names = list(feature_names)
    ranks = [_centered_ranks(frame[name].to_numpy(dtype=float)) for name in names]
    constant = [not np.any(r) for r in ranks]

    matrix = np.full((len(names), len(names)), np.nan)
    for a in range(len(names)):
        if constant[a]:
            continue
        matrix[a, a] = 1.0
        for b in range(a + 1, len(names)):
            if constant[b]:
                continue
            matrix[a, b] = matrix[b, a] = _rank_pearson(ranks[a], ranks[b])
    undefined = [name for name, flag in zip(names, constant) if flag]
    if undefined:
        logger.warning("Correlations undefined for constant features: %s", ", ".join(undefined))
    return pd.DataFrame(matrix, index=names, columns=names)


def correlation_pairs(matrix, threshold=0.5):
    """
    Strongly correlated feature pairs, strongest first, labelled with their categories

    Returns:
        pandas.DataFrame with columns a, b, rho, same_group
    """
    rows = []
    names = list(matrix.index)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            rho = matrix.iat[a, b]
            if np.isfinite(rho) and abs(rho) >= threshold:
                same = feature_group(names[a]) == feature_group(names[b])
                rows.append((names[a], names[b], rho, same))
    pairs = pd.DataFrame(rows, columns=["a", "b", "rho", "same_group"])
    if len(pairs):
        pairs = pairs.reindex(pairs["rho"].abs().sort_values(ascending=False, kind="stable").index)
    return pairs.reset_index(drop=True)
