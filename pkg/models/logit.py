from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from utils.errors import DataError, UsageError


@dataclass(frozen=True)
class LogitConfig:
    """
    Optimizer settings for logistic regression
    """

    max_iter: int = 100
    tolerance: float = 1e-8  # on the gradient norm of the mean negative log-likelihood
    ridge: float = 1e-8  # L2 penalty on coefficients, never on the intercept
    standardize: bool = False
    max_step_halvings: int = 30
    threshold: float = 0.5

    def __post_init__(self):
        if self.max_iter < 1:
            raise UsageError(f"max_iter must be positive, got {self.max_iter}")
        if self.tolerance <= 0:
            raise UsageError(f"tolerance must be positive, got {self.tolerance}")
        if self.ridge < 0:
            raise UsageError(f"ridge must be non-negative, got {self.ridge}")
        if not 0.0 < self.threshold < 1.0:
            raise UsageError(f"decision threshold must lie in (0, 1), got {self.threshold}")

    @classmethod
    def from_dict(cls, data):
        return cls(
            max_iter=int(data.get("max_iter", 100)),
            tolerance=float(data.get("tolerance", 1e-8)),
            ridge=float(data.get("ridge", 1e-8)),
            standardize=bool(data.get("standardize", False)),
            max_step_halvings=int(data.get("max_step_halvings", 30)),
            threshold=float(data.get("threshold", 0.5)),
        )

    def to_dict(self):
        return {
            "max_iter": self.max_iter,
            "tolerance": self.tolerance,
            "ridge": self.ridge,
            "standardize": self.standardize,
            "max_step_halvings": self.max_step_halvings,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class LogitModel:
    """
    Fitted logistic regression on the raw feature scale

    P(persist | x) = sigmoid(intercept + sum_f beta_f * x_f)
    """

    intercept: float
    coefficients: dict
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def feature_names(self):
        return tuple(self.coefficients)

    def linear_predictor(self, X):
        beta = np.array([self.coefficients[name] for name in self.feature_names])
        return self.intercept + np.asarray(X, dtype=float) @ beta

    def predict_proba(self, frame):
        """Persist probability for every row of a feature table."""
        return expit(self.linear_predictor(frame[list(self.feature_names)].to_numpy(dtype=float)))

    def predict(self, frame, threshold=None):
        threshold = self.metadata.get("threshold", 0.5) if threshold is None else threshold
        return (self.predict_proba(frame) >= threshold).astype(int)

    def odds_ratio(self, name):
        # inf when a quasi-separating coefficient overflows exp
        with np.errstate(over="ignore"):
            return float(np.exp(self.coefficients[name]))

    def to_dict(self):
        return {
            "model_type": "logit",
            "intercept": self.intercept,
            "coefficients": dict(self.coefficients),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("model_type") != "logit":
            raise DataError(f"Not a logit model (model_type={data.get('model_type')!r})")
        return cls(
            intercept=float(data["intercept"]),
            coefficients={name: float(value) for name, value in data["coefficients"].items()},
            metadata=dict(data.get("metadata", {})),
        )
