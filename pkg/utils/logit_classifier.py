"""
Binary logistic regression fitted by Newton / iteratively reweighted least
squares with step halving, plus coefficient and odds-ratio reporting.

Parameters are laid out as [intercept, beta_1, ..., beta_p]. The objective is
the mean negative log-likelihood plus ridge/2 * |beta|^2 (intercept unpenalized).
"""

import logging
import math

import numpy as np
import pandas as pd
from scipy.special import expit, log_expit

from models.edge import FEATURE_NAMES
from models.logit import LogitConfig, LogitModel
from utils.edge_features import as_feature_frame
from utils.errors import DataError

logger = logging.getLogger(__name__)


def _design(X):
    X = np.asarray(X, dtype=float)
    return np.hstack([np.ones((X.shape[0], 1)), X])


def log_likelihood(params, X, y):
    """
    Log-likelihood of 0/1 labels under a logistic model

    Args:
        params: [intercept, beta...]
        X: (n, p) raw feature matrix
        y: 0/1 labels

    Returns:
        float: sum over rows of y log p + (1 - y) log (1 - p)
    """
    z = _design(X) @ np.asarray(params, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sum(y * log_expit(z) + (1.0 - y) * log_expit(-z)))


def log_likelihood_gradient(params, X, y):
    """
    Analytic gradient of ``log_likelihood``: A^T (y - p) with A = [1, X]

    Returns:
        numpy.ndarray of the same shape as params
    """
    A = _design(X)
    p = expit(A @ np.asarray(params, dtype=float))
    return A.T @ (np.asarray(y, dtype=float) - p)


def _objective(params, A, y, ridge):
    z = A @ params
    nll = -np.mean(y * log_expit(z) + (1.0 - y) * log_expit(-z))
    return nll + 0.5 * ridge * float(params[1:] @ params[1:])


def _standardization(X, enabled):
    if not enabled:
        return np.zeros(X.shape[1]), np.ones(X.shape[1])
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    return means, scales


def fit_params(X, y, cfg):
    """
    Newton iterations on the penalized mean negative log-likelihood

    Every accepted step does not increase the objective; when no halving of
    the Newton step improves it the fit stops and reports a stall.

    Returns:
        tuple: (params, info dict with iterations, gradient_norm, converged, stalled)
    """
    A = _design(X)
    n, k = A.shape
    penalty = np.full(k, cfg.ridge)
    penalty[0] = 0.0
    params = np.zeros(k)
    params[0] = math.log(y.mean() / (1.0 - y.mean()))
    current = _objective(params, A, y, cfg.ridge)
    info = {"iterations": 0, "converged": False, "stalled": False}

    for iteration in range(1, cfg.max_iter + 1):
        p = expit(A @ params)
        gradient = A.T @ (p - y) / n + penalty * params
        grad_norm = float(np.linalg.norm(gradient))
        if grad_norm < cfg.tolerance:
            info["converged"] = True
            break
        weights = p * (1.0 - p)
        hessian = (A.T * weights) @ A / n + np.diag(penalty)
        try:
            step = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, gradient, rcond=None)[0]

        scale = 1.0
        for _ in range(cfg.max_step_halvings + 1):
            candidate = params - scale * step
            value = _objective(candidate, A, y, cfg.ridge)
            if np.isfinite(value) and value <= current:
                break
            scale /= 2.0
        else:
            info["stalled"] = True
            break
        params, current = candidate, value
        info["iterations"] = iteration
        logger.debug("iteration %d: objective %.10g, |grad| %.3g, step scale %g", iteration, current, grad_norm, scale)

    p = expit(A @ params)
    final_gradient = A.T @ (p - y) / n + penalty * params
    info["gradient_norm"] = float(np.linalg.norm(final_gradient))
    info["converged"] = info["converged"] or info["gradient_norm"] < cfg.tolerance
    info["objective"] = float(current)
    return params, info


def train_logit(edges, cfg=None, feature_names=FEATURE_NAMES, class_column="class"):
    """
    Fit a main-effects logistic regression predicting persistence

    Args:
        edges: DataFrame with feature and class columns, or sequence of LabeledEdge
        cfg: LogitConfig, defaults if None
        feature_names: features entering the model
        class_column: 0/1 class column

    Returns:
        LogitModel with coefficients on the raw feature scale
    """
    cfg = cfg or LogitConfig()
    frame = edges if isinstance(edges, pd.DataFrame) else as_feature_frame(edges)
    if len(frame) == 0:
        raise DataError("Cannot fit logistic regression on an empty training set")
    feature_names = tuple(feature_names)
    X = frame[list(feature_names)].to_numpy(dtype=float)
    y = frame[class_column].to_numpy(dtype=float)
    if not np.all(np.isfinite(X)):
        raise DataError("Training features contain non-finite values")
    if np.unique(y).size < 2:
        raise DataError("Logistic regression needs both classes in the training set")

    means, scales = _standardization(X, cfg.standardize)
    params, info = fit_params((X - means) / scales, y, cfg)

    # Map back to the raw scale.
    beta = params[1:] / scales
    intercept = float(params[0] - np.sum(beta * means))
    if not info["converged"]:
        logger.warning(
            "Logistic regression stopped after %d iterations without converging (|grad| %.3g%s)",
            info["iterations"],
            info["gradient_norm"],
            ", line search stalled" if info["stalled"] else "",
        )
    metadata = dict(info)
    metadata.update(
        {
            "n_train": int(len(frame)),
            "config": cfg.to_dict(),
            "threshold": cfg.threshold,
            "standardization": (
                {"means": means.tolist(), "scales": scales.tolist()} if cfg.standardize else None
            ),
        }
    )
    model = LogitModel(
        intercept=intercept,
        coefficients={name: float(value) for name, value in zip(feature_names, beta)},
        metadata=metadata,
    )
    logger.info("Fitted logit on %d edges in %d iterations", len(frame), info["iterations"])
    return model


def predict_proba(model, features):
    """
    Persist probability of one feature vector

    Args:
        model: LogitModel
        features: mapping feature name -> value, or EdgeFeatureVector

    Returns:
        float in (0, 1)
    """
    if hasattr(features, "as_dict"):
        features = features.as_dict()
    z = model.intercept + sum(beta * float(features[name]) for name, beta in model.coefficients.items())
    return float(expit(z))


def predict_class(model, features, threshold=0.5):
    return int(predict_proba(model, features) >= threshold)


def report_odds(model):
    """
    Coefficient table with odds ratios exp(beta)

    Coefficients large enough to overflow report an odds ratio of inf.

    Returns:
        pandas.DataFrame with columns feature, beta, odds
    """
    names = list(model.coefficients)
    betas = np.array([model.coefficients[name] for name in names], dtype=float)
    with np.errstate(over="ignore"):
        odds = np.exp(betas)
    return pd.DataFrame({"feature": names, "beta": betas, "odds": odds})
