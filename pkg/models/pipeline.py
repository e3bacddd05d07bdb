from dataclasses import dataclass, field, replace
from pathlib import Path

from models.call_record import IngestConfig
from models.decision_tree import TreeConfig
from models.edge import INJN_MODES, PERSIST_MODES
from models.evaluation import SplitConfig
from models.logit import LogitConfig
from models.synth import SynthConfig
from models.window_graph import NEIGHBOR_MODES, WindowConfig
from utils.errors import UsageError


@dataclass(frozen=True)
class FeatureOptions:
    """Labeling, ranking and correlation settings of the features stages"""

    persist_mode: str = "directed"
    injn_mode: str = "arcs"
    gain_mode: str = "weighted"
    strategy: str = "best-binary-split"
    bins: int = 4
    correlation_threshold: float = 0.5

    def __post_init__(self):
        if self.persist_mode not in PERSIST_MODES:
            raise UsageError(f"persist_mode must be one of {PERSIST_MODES}, got '{self.persist_mode}'")
        if self.injn_mode not in INJN_MODES:
            raise UsageError(f"injn_mode must be one of {INJN_MODES}, got '{self.injn_mode}'")

    @classmethod
    def from_dict(cls, data):
        return cls(
            persist_mode=data.get("persist_mode", "directed"),
            injn_mode=data.get("injn_mode", "arcs"),
            gain_mode=data.get("gain_mode", "weighted"),
            strategy=data.get("strategy", "best-binary-split"),
            bins=int(data.get("bins", 4)),
            correlation_threshold=float(data.get("correlation_threshold", 0.5)),
        )

    def to_dict(self):
        return {
            "persist_mode": self.persist_mode,
            "injn_mode": self.injn_mode,
            "gain_mode": self.gain_mode,
            "strategy": self.strategy,
            "bins": self.bins,
            "correlation_threshold": self.correlation_threshold,
        }


@dataclass(frozen=True)
class PipelineConfig:
    """
    Everything one end-to-end run needs

    ``seed`` is the only source of randomness: it is copied into the split
    and synth settings.
    """

    out_dir: Path
    window: WindowConfig
    records: Path = None  # None runs the generator first
    ingest: dict = field(default_factory=dict)
    max_neighbors: int = 50
    neighbor_mode: str = "out"
    features: FeatureOptions = field(default_factory=FeatureOptions)
    split: SplitConfig = field(default_factory=SplitConfig)
    tree: TreeConfig = field(default_factory=TreeConfig)
    logit: LogitConfig = field(default_factory=LogitConfig)
    synth: SynthConfig = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.records is None and self.synth is None:
            raise UsageError("Give either [paths] records or a [synth] table")
        if self.threads < 1:
            raise UsageError(f"threads must be positive, got {self.threads}")
        if self.neighbor_mode not in NEIGHBOR_MODES:
            raise UsageError(f"neighbor_mode must be one of {NEIGHBOR_MODES}, got '{self.neighbor_mode}'")
        if self.split.seed != self.seed:
            object.__setattr__(self, "split", replace(self.split, seed=self.seed))
        if self.synth is not None and (self.synth.seed, self.synth.window) != (self.seed, self.window):
            object.__setattr__(self, "synth", replace(self.synth, seed=self.seed, window=self.window))

    def ingest_config(self):
        """IngestConfig whose horizon defaults to the two windows."""
        table = dict(self.ingest)
        table.setdefault("start", self.window.t0)
        table.setdefault("end", self.window.tau2.end)
        table.setdefault("has_header", True)
        return IngestConfig.from_dict(table)

    def with_overrides(self, seed=None, threads=None, out_dir=None, records=None):
        """Apply command-line flags on top of file values."""
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if threads is not None:
            changes["threads"] = threads
        if out_dir is not None:
            changes["out_dir"] = Path(out_dir)
        if records is not None:
            changes["records"] = Path(records)
        return replace(self, **changes) if changes else self

    @classmethod
    def from_dict(cls, data, base_dir=None):
        """
        Build a config from a parsed TOML document

        Args:
            data: mapping with the tables paths, ingest, window, robot_filter,
                features, split, tree, logit, synth and top-level seed, threads
            base_dir: directory relative paths are resolved against

        Returns:
            PipelineConfig
        """
        base_dir = Path(base_dir or ".")
        paths = data.get("paths", {})
        records = paths.get("records")
        synth = SynthConfig.from_dict(data["synth"]) if "synth" in data else None
        if "window" in data:
            window = WindowConfig.from_dict(data["window"])
        elif synth is not None:
            window = synth.window
        else:
            raise UsageError("A [window] table is required when no [synth] table is given")
        robot = data.get("robot_filter", {})
        return cls(
            out_dir=base_dir / paths.get("out_dir", "out"),
            window=window,
            records=None if records is None else base_dir / records,
            ingest=dict(data.get("ingest", {})),
            max_neighbors=int(robot.get("max_neighbors", 50)),
            neighbor_mode=robot.get("neighbor_mode", "out"),
            features=FeatureOptions.from_dict(data.get("features", {})),
            split=SplitConfig.from_dict(data.get("split", {})),
            tree=TreeConfig.from_dict(data.get("tree", {})),
            logit=LogitConfig.from_dict(data.get("logit", {})),
            synth=synth,
            seed=int(data.get("seed", 0)),
            threads=int(data.get("threads", 1)),
        )

    def to_dict(self):
        return {
            "paths": {
                "out_dir": str(self.out_dir),
                "records": None if self.records is None else str(self.records),
            },
            "ingest": dict(self.ingest),
            "window": self.window.to_dict(),
            "robot_filter": {"max_neighbors": self.max_neighbors, "neighbor_mode": self.neighbor_mode},
            "features": self.features.to_dict(),
            "split": self.split.to_dict(),
            "tree": self.tree.to_dict(),
            "logit": self.logit.to_dict(),
            "synth": None if self.synth is None else self.synth.to_dict(),
            "seed": self.seed,
            "threads": self.threads,
        }
