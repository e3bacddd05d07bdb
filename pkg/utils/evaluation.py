"""
Train/test splitting, confusion-matrix metrics and side-by-side model reports.
"""

import logging

import numpy as np
import pandas as pd

from models.edge import DECAY, PERSIST
from models.evaluation import METRICS, ClassMetrics, ConfusionCounts, EvalReport, SplitConfig
from utils.errors import DataError

logger = logging.getLogger(__name__)


def _train_size(n, fraction):
    return min(max(int(round(n * fraction)), 1), n - 1)


def split_indices(n, cfg, classes=None):
    """
    Choose training rows

    Args:
        n: number of rows, at least 2
        cfg: SplitConfig
        classes: 0/1 labels, required when ``cfg.stratify`` is set

    Returns:
        tuple: (train positions, test positions), each in increasing order
    """
    if n < 2:
        raise DataError(f"Splitting needs at least 2 edges, got {n}")
    rng = np.random.default_rng(cfg.seed)
    if cfg.stratify:
        if classes is None:
            raise ValueError("Stratified splitting needs the class labels")
        classes = np.asarray(classes)
        chosen = []
        for label in (DECAY, PERSIST):
            members = rng.permutation(np.flatnonzero(classes == label))
            chosen.append(members[: int(round(members.size * cfg.train_fraction))])
        train = np.concatenate(chosen)
        if train.size == 0 or train.size == n:
            # Tiny classes rounded away: fall back to a plain shuffle.
            train = rng.permutation(n)[: _train_size(n, cfg.train_fraction)]
    else:
        train = rng.permutation(n)[: _train_size(n, cfg.train_fraction)]
    mask = np.zeros(n, dtype=bool)
    mask[train] = True
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def split(edges, cfg=None, class_column="class"):
    """
    Randomly partition labeled edges into a training and a testing set

    Args:
        edges: DataFrame of labeled edges, or a sequence of LabeledEdge
        cfg: SplitConfig, defaults (2/3 train, seed 0) if None
        class_column: class column used for stratification

    Returns:
        tuple: (train, test) of the same kind as ``edges``, rows in input order
    """
    cfg = cfg or SplitConfig()
    if isinstance(edges, pd.DataFrame):
        classes = edges[class_column].to_numpy() if cfg.stratify else None
        train, test = split_indices(len(edges), cfg, classes)
        result = edges.iloc[train].reset_index(drop=True), edges.iloc[test].reset_index(drop=True)
    else:
        edges = list(edges)
        classes = [edge.label for edge in edges] if cfg.stratify else None
        train, test = split_indices(len(edges), cfg, classes)
        result = [edges[k] for k in train], [edges[k] for k in test]
    logger.info("Split %d edges into %d train / %d test (seed %d)", len(edges), len(train), len(test), cfg.seed)
    return result


def f_measure(precision, recall):
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def confusion_counts(predicted, actual, positive=PERSIST):
    """
    Count agreements between predicted and true classes

    Args:
        predicted: predicted 0/1 classes
        actual: true 0/1 classes
        positive: class treated as positive

    Returns:
        ConfusionCounts
    """
    predicted = np.asarray(predicted) == positive
    actual = np.asarray(actual) == positive
    return ConfusionCounts(
        tp=int(np.count_nonzero(predicted & actual)),
        fp=int(np.count_nonzero(predicted & ~actual)),
        tn=int(np.count_nonzero(~predicted & ~actual)),
        fn=int(np.count_nonzero(~predicted & actual)),
    )


def _ratio(numerator, denominator, what, degenerate):
    if denominator == 0:
        degenerate.append(what)
        return 0.0
    return numerator / denominator


def class_metrics(counts, label, degenerate):
    name = "persist" if label == PERSIST else "decay"
    precision = _ratio(counts.tp, counts.tp + counts.fp, f"{name}.precision", degenerate)
    recall = _ratio(counts.tp, counts.tp + counts.fn, f"{name}.recall", degenerate)
    return ClassMetrics(
        label=label,
        counts=counts,
        accuracy=(counts.tp + counts.tn) / counts.total,
        precision=precision,
        recall=recall,
        f_measure=f_measure(precision, recall),
    )


def evaluate(predicted, actual, model_name="model"):
    """
    Accuracy, precision, recall and F for both classes

    Zero denominators give 0 and are listed in ``EvalReport.degenerate``.

    Args:
        predicted: predicted 0/1 classes
        actual: true 0/1 classes, same length
        model_name: identifier stored in the report

    Returns:
        EvalReport
    """
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise DataError(f"Length mismatch: {predicted.size} predictions vs {actual.size} classes")
    if actual.size == 0:
        raise DataError("Cannot evaluate on an empty test set")

    counts = confusion_counts(predicted, actual, positive=PERSIST)
    degenerate = []
    report = EvalReport(
        model=model_name,
        persist=class_metrics(counts, PERSIST, degenerate),
        decay=class_metrics(counts.swapped(), DECAY, degenerate),
        degenerate=tuple(degenerate),
    )
    if degenerate:
        logger.warning("%s: undefined metrics reported as 0: %s", model_name, ", ".join(degenerate))
    logger.info(
        "%s: accuracy %.3f, persist F %.3f, decay F %.3f",
        model_name,
        report.persist.accuracy,
        report.persist.f_measure,
        report.decay.f_measure,
    )
    return report


def compare(reports):
    """
    Tabulate reports side by side

    Args:
        reports: one or more EvalReport

    Returns:
        pandas.DataFrame: rows are metrics, columns are (model, class)
    """
    reports = list(reports)
    if not reports:
        raise ValueError("compare needs at least one report")
    columns = {}
    seen = {}
    for report in reports:
        seen[report.model] = seen.get(report.model, 0) + 1
        name = report.model if seen[report.model] == 1 else f"{report.model}#{seen[report.model]}"
        for row in report.rows():
            columns[(name, row.class_name)] = [row.metric(metric) for metric in METRICS]
    frame = pd.DataFrame(columns, index=list(METRICS))
    frame.columns = pd.MultiIndex.from_tuples(frame.columns, names=["model", "class"])
    return frame


def render_comparison(frame):
    return frame.to_string(float_format=lambda value: f"{value:.3f}")


def bayes_rate(probabilities):
    """
    Accuracy of the Bayes-optimal classifier under known persist probabilities

    Args:
        probabilities: planted persist probability per edge

    Returns:
        float: mean of max(p, 1 - p)
    """
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.size == 0:
        raise ValueError("Bayes rate of an empty sample is undefined")
    return float(np.mean(np.maximum(probabilities, 1.0 - probabilities)))
