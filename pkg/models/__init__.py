from .call_record import CallRecord, CallType, IngestConfig
from .decision_tree import DecisionTree, Leaf, Split, TreeConfig
from .edge import EdgeFeatureVector, LabeledEdge
from .evaluation import ClassMetrics, ConfusionCounts, EvalReport, SplitConfig
from .logit import LogitConfig, LogitModel
from .pipeline import FeatureOptions, PipelineConfig
from .synth import DecayRule, SynthConfig
from .window_graph import ArcStats, Window, WindowConfig, WindowGraph

__all__ = [
    'CallRecord',
    'CallType',
    'IngestConfig',
    'DecisionTree',
    'Leaf',
    'Split',
    'TreeConfig',
    'EdgeFeatureVector',
    'LabeledEdge',
    'ClassMetrics',
    'ConfusionCounts',
    'EvalReport',
    'SplitConfig',
    'LogitConfig',
    'LogitModel',
    'FeatureOptions',
    'PipelineConfig',
    'DecayRule',
    'SynthConfig',
    'ArcStats',
    'Window',
    'WindowConfig',
    'WindowGraph',
]
