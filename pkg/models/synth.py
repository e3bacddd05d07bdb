import math
from dataclasses import dataclass, field, replace

from models.edge import FEATURE_NAMES
from models.window_graph import WindowConfig
from utils.errors import UsageError

FOUR_WEEKS = 28 * 24 * 3600
DEFAULT_T0 = 1_200_000_000


@dataclass(frozen=True)
class DecayRule:
    """
    Planted persistence rule: P(persist) = sigmoid(intercept + sum_f beta_f * f)

    When the corpus is generated with a target decay share the intercept is
    recalibrated and the calibrated value is reported in the truth file.
    """

    coefficients: dict = field(default_factory=dict)
    intercept: float = 0.0

    def __post_init__(self):
        unknown = sorted(set(self.coefficients) - set(FEATURE_NAMES))
        if unknown:
            raise UsageError(f"Decay rule uses unknown features {unknown}")

    @property
    def features(self):
        return tuple(name for name in FEATURE_NAMES if self.coefficients.get(name, 0.0) != 0.0)

    def to_dict(self):
        return {
            "intercept": self.intercept,
            "coefficients": {name: self.coefficients[name] for name in FEATURE_NAMES if name in self.coefficients},
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            coefficients={name: float(beta) for name, beta in data.get("coefficients", {}).items()},
            intercept=float(data.get("intercept", 0.0)),
        )


@dataclass(frozen=True)
class SynthConfig:
    """
    Parameters of the synthetic call-log generator

    Out-degree budgets are lognormal with median ``degree_median`` and are
    capped at ``max_out_degree``; per-arc call rates are lognormal.
    """

    n_vertices: int = 2000
    degree_median: float = 3.0
    degree_sigma: float = 0.82
    max_out_degree: int = 49
    reciprocity: float = 0.35
    triangle_boost: float = 0.5
    call_rate_mu: float = 0.3
    call_rate_sigma: float = 1.0
    reverse_rate_sigma: float = 0.5
    text_share: float = 0.0
    rule: DecayRule = field(default_factory=DecayRule)
    target_decay_share: float = 0.43  # None keeps the rule's own intercept
    window: WindowConfig = field(default_factory=lambda: WindowConfig(DEFAULT_T0, FOUR_WEEKS, FOUR_WEEKS))
    seed: int = 0
    preset: str = "custom"

    def __post_init__(self):
        if self.n_vertices < 3:
            raise UsageError(f"n_vertices must be at least 3, got {self.n_vertices}")
        if not 1 <= self.max_out_degree < self.n_vertices:
            raise UsageError(
                f"max_out_degree must lie in [1, n_vertices - 1], got {self.max_out_degree}"
            )
        if self.degree_median <= 0 or self.degree_sigma < 0:
            raise UsageError("Degree distribution needs a positive median and a non-negative sigma")
        if self.call_rate_sigma < 0 or self.reverse_rate_sigma < 0:
            raise UsageError("Call-rate sigmas must be non-negative")
        for name in ("reciprocity", "triangle_boost", "text_share"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise UsageError(f"{name} must be a probability, got {value}")
        if self.text_share == 1.0:
            raise UsageError("text_share must be below 1")
        if self.target_decay_share is not None and not 0.0 <= self.target_decay_share <= 1.0:
            raise UsageError(f"target_decay_share must be a probability, got {self.target_decay_share}")

    @property
    def degree_mu(self):
        return math.log(self.degree_median)

    @classmethod
    def from_dict(cls, data):
        """
        Build a config from a ``[synth]`` table, starting from its preset

        Args:
            data: Dictionary with an optional ``preset`` plus overrides

        Returns:
            SynthConfig
        """
        base = preset(data.get("preset", "paperlike"))
        overrides = {}
        for key in (
            "n_vertices", "max_out_degree", "seed",
        ):
            if key in data:
                overrides[key] = int(data[key])
        for key in (
            "degree_median", "degree_sigma", "reciprocity", "triangle_boost",
            "call_rate_mu", "call_rate_sigma", "reverse_rate_sigma", "text_share",
        ):
            if key in data:
                overrides[key] = float(data[key])
        if "target_decay_share" in data:
            share = data["target_decay_share"]
            overrides["target_decay_share"] = None if share in (None, "", "none") else float(share)
        if "rule" in data:
            overrides["rule"] = DecayRule.from_dict(data["rule"])
            overrides["preset"] = "custom"
        if "window" in data:
            overrides["window"] = WindowConfig.from_dict(data["window"])
        return replace(base, **overrides)

    def to_dict(self):
        return {
            "preset": self.preset,
            "n_vertices": self.n_vertices,
            "degree_median": self.degree_median,
            "degree_sigma": self.degree_sigma,
            "max_out_degree": self.max_out_degree,
            "reciprocity": self.reciprocity,
            "triangle_boost": self.triangle_boost,
            "call_rate_mu": self.call_rate_mu,
            "call_rate_sigma": self.call_rate_sigma,
            "reverse_rate_sigma": self.reverse_rate_sigma,
            "text_share": self.text_share,
            "rule": self.rule.to_dict(),
            "target_decay_share": self.target_decay_share,
            "window": self.window.to_dict(),
            "seed": self.seed,
        }


PRESETS = {
    # More calls either way and a recent last call favour persistence; a late
    # first call and a wide ego network favour decay.
    "paperlike": SynthConfig(
        rule=DecayRule(
            coefficients={"d_i": -0.2, "c_ij": 0.25, "c_ji": 0.3, "fdate": -2.3021, "edate": 2.9218},
        ),
        preset="paperlike",
    ),
    "cij-only": SynthConfig(
        rule=DecayRule(coefficients={"c_ij": 2.0}),
        preset="cij-only",
    ),
}


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise UsageError(f"Unknown synth preset '{name}' (expected one of {sorted(PRESETS)})")
