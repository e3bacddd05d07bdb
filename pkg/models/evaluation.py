from dataclasses import dataclass, field

from models.edge import CLASS_NAMES, DECAY, PERSIST
from utils.errors import DataError, UsageError

METRICS = ("accuracy", "precision", "recall", "f_measure")


@dataclass(frozen=True)
class SplitConfig:
    """
    Random train/test split of labeled edges
    """

    train_fraction: float = 2 / 3
    seed: int = 0
    stratify: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise UsageError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")

    @classmethod
    def from_dict(cls, data):
        return cls(
            train_fraction=float(data.get("train_fraction", 2 / 3)),
            seed=int(data.get("seed", 0)),
            stratify=bool(data.get("stratify", False)),
        )

    def to_dict(self):
        return {"train_fraction": self.train_fraction, "seed": self.seed, "stratify": self.stratify}


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self):
        """Counts with the other class taken as positive."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class ClassMetrics:
    """Fit statistics with one class taken as the positive class"""

    label: int
    counts: ConfusionCounts
    accuracy: float
    precision: float
    recall: float
    f_measure: float

    @property
    def class_name(self):
        return CLASS_NAMES[self.label]

    def metric(self, name):
        if name not in METRICS:
            raise KeyError(name)
        return getattr(self, name)

    def to_dict(self):
        return {
            "class": self.class_name,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "confusion": self.counts.to_dict(),
        }


@dataclass(frozen=True)
class EvalReport:
    """
    Per-class fit statistics of one model on one test set
    """

    model: str
    persist: ClassMetrics
    decay: ClassMetrics
    degenerate: tuple = field(default_factory=tuple)

    @property
    def n(self):
        return self.persist.counts.total

    def rows(self):
        return (self.persist, self.decay)

    def for_class(self, label):
        if label == PERSIST:
            return self.persist
        if label == DECAY:
            return self.decay
        raise KeyError(label)

    def to_dict(self):
        return {
            "model": self.model,
            "n": self.n,
            "classes": [row.to_dict() for row in self.rows()],
            "degenerate": list(self.degenerate),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            rows = {}
            for row in data["classes"]:
                label = PERSIST if row["class"] == CLASS_NAMES[PERSIST] else DECAY
                rows[label] = ClassMetrics(
                    label=label,
                    counts=ConfusionCounts(**row["confusion"]),
                    accuracy=float(row["accuracy"]),
                    precision=float(row["precision"]),
                    recall=float(row["recall"]),
                    f_measure=float(row["f_measure"]),
                )
            return cls(
                model=data.get("model", "model"),
                persist=rows[PERSIST],
                decay=rows[DECAY],
                degenerate=tuple(data.get("degenerate", ())),
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"Not an evaluation report: missing {exc}")
