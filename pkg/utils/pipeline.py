"""
End-to-end runs.

Every stage reads files and writes files. ``manifest.json`` records, per
stage, the hashes of the inputs it read, a fingerprint of its parameters and
the hashes of the outputs it wrote; with ``resume`` a stage whose record still
matches the files on disk is skipped.
"""

import hashlib
import json
import logging
import platform
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd
import scipy

from models.decision_tree import DecisionTree
from models.evaluation import EvalReport
from models.logit import LogitModel
from models.pipeline import PipelineConfig
from utils import __version__
from utils.cdr_ingest import load_records, parse_records, write_records
from utils.edge_features import label_edges, read_features, write_features
from utils.errors import DataError, StageError, UsageError
from utils.evaluation import bayes_rate, compare, evaluate, render_comparison, split
from utils.feature_stats import correlation_pairs, spearman_matrix, summarize
from utils.files import file_sha256, read_json, write_json
from utils.infogain import rank_features
from utils.logit_classifier import train_logit
from utils.synth import RECORDS_FILE, TRUTH_EDGES_FILE, TRUTH_FILE, generate, write_corpus
from utils.temporal_graph import graph_statistics, read_window_graph, split_windows, write_window_graph
from utils.tree_classifier import train_tree

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
CORPUS_DIR = "corpus"
CALLS = "calls.csv"
INGEST_REPORT = "ingest_report.json"
TAU1 = "tau1.csv"
TAU2 = "tau2.csv"
GRAPH_STATS = "graph_stats.json"
ROBOT_FILTER = "robot_filter.json"
FEATURES = "features.csv"
SUMMARY = "summary.json"
CORRELATIONS = "correlations.csv"
CORRELATED_PAIRS = "correlated_pairs.csv"
RANKING = "ranking.json"
TRAIN = "train.csv"
TEST = "test.csv"
TREE_MODEL = "tree.json"
LOGIT_MODEL = "logit.json"
TREE_REPORT = "report_tree.json"
LOGIT_REPORT = "report_logit.json"
COMPARISON = "comparison.txt"
COMPARISON_JSON = "comparison.json"


def load_config(path):
    """
    Read a TOML experiment file

    Args:
        path: config file; relative paths inside it are resolved against its directory

    Returns:
        PipelineConfig
    """
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise UsageError(f"Cannot read config '{path}': {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"Config '{path}' is not valid TOML: {exc}")
    return PipelineConfig.from_dict(data, base_dir=path.parent)


def load_model(path):
    """Read a tree or logit model file, dispatching on ``model_type``."""
    data = read_json(path, "model file")
    kind = data.get("model_type")
    if kind == "tree":
        return DecisionTree.from_dict(data)
    if kind == "logit":
        return LogitModel.from_dict(data)
    raise DataError(f"Model file '{path}' has unknown model_type {kind!r}")


def params_fingerprint(params):
    encoded = json.dumps(params, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()


def library_versions():
    return {
        "decaygraph": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "pandas": pd.__version__,
        "scipy": scipy.__version__,
        "networkx": nx.__version__,
    }


@dataclass(frozen=True)
class Stage:
    name: str
    inputs: tuple
    outputs: tuple
    params: dict
    action: object  # callable(cfg) -> JSON-able summary


def records_source(cfg):
    if cfg.records is not None:
        return Path(cfg.records)
    return Path(cfg.out_dir) / CORPUS_DIR / RECORDS_FILE


def _synth(cfg):
    corpus = generate(cfg.synth)
    write_corpus(corpus, Path(cfg.out_dir) / CORPUS_DIR)
    return {"records": len(corpus.records), "edges": corpus.truth["n_edges"], "decay_share": corpus.truth["decay_share"]}


def _ingest(cfg):
    out = Path(cfg.out_dir)
    records, report = parse_records(records_source(cfg), cfg.ingest_config())
    write_records(records, out / CALLS)
    write_json(report.to_dict(), out / INGEST_REPORT)
    return report.to_dict()


def _build(cfg):
    out = Path(cfg.out_dir)
    windows = split_windows(
        load_records(out / CALLS),
        cfg.window,
        max_neighbors=cfg.max_neighbors,
        neighbor_mode=cfg.neighbor_mode,
        threads=cfg.threads,
    )
    write_window_graph(windows.tau1, out / TAU1)
    write_window_graph(windows.tau2, out / TAU2)
    stats = {
        "tau1": graph_statistics(windows.tau1).to_dict(),
        "tau2": graph_statistics(windows.tau2).to_dict(),
    }
    write_json(stats, out / GRAPH_STATS)
    write_json(windows.robot_filter.to_dict(), out / ROBOT_FILTER)
    return {"tau1_arcs": stats["tau1"]["arcs"], "tau2_arcs": stats["tau2"]["arcs"], "robots": len(windows.robot_filter.removed)}


def _features(cfg):
    out = Path(cfg.out_dir)
    edges = label_edges(
        read_window_graph(out / TAU1),
        read_window_graph(out / TAU2),
        persist_mode=cfg.features.persist_mode,
        injn_mode=cfg.features.injn_mode,
        threads=cfg.threads,
    )
    if not edges:
        raise DataError("No tau1 edges to label", hint="Check the window bounds against the record timestamps.")
    write_features(edges, out / FEATURES)
    persisting = sum(edge.label for edge in edges)
    return {"edges": len(edges), "persist": persisting, "decay": len(edges) - persisting}


def _summarize(cfg):
    out = Path(cfg.out_dir)
    summary = summarize(read_features(out / FEATURES))
    write_json(summary.to_dict(), out / SUMMARY)
    return {"edges": summary.n_edges}


def _correlate(cfg):
    out = Path(cfg.out_dir)
    matrix = spearman_matrix(read_features(out / FEATURES))
    matrix.to_csv(out / CORRELATIONS, index_label="feature")
    pairs = correlation_pairs(matrix, cfg.features.correlation_threshold)
    pairs.to_csv(out / CORRELATED_PAIRS, index=False)
    return {"correlated_pairs": len(pairs)}


def _rank(cfg):
    out = Path(cfg.out_dir)
    ranking = rank_features(
        read_features(out / FEATURES),
        mode=cfg.features.gain_mode,
        strategy=cfg.features.strategy,
        bins=cfg.features.bins,
        min_bucket=cfg.tree.min_leaf_size,
    )
    write_json(ranking.to_dict(), out / RANKING)
    return {"top": ranking.top().name, "gain": ranking.top().gain}


def _split(cfg):
    out = Path(cfg.out_dir)
    train, test = split(read_features(out / FEATURES), cfg.split)
    write_features(train, out / TRAIN)
    write_features(test, out / TEST)
    return {"train": len(train), "test": len(test)}


def _train(cfg):
    out = Path(cfg.out_dir)
    train = read_features(out / TRAIN)
    tree = train_tree(train, cfg.tree)
    write_json(tree.to_dict(), out / TREE_MODEL)
    logit = train_logit(train, cfg.logit)
    write_json(logit.to_dict(), out / LOGIT_MODEL)
    return {
        "tree_leaves": tree.n_leaves(),
        "tree_depth": tree.depth(),
        "logit_iterations": logit.metadata["iterations"],
        "logit_converged": logit.metadata["converged"],
    }


def _evaluate(cfg):
    out = Path(cfg.out_dir)
    test = read_features(out / TEST)
    accuracies = {}
    for name, model_file, report_file in (("tree", TREE_MODEL, TREE_REPORT), ("logit", LOGIT_MODEL, LOGIT_REPORT)):
        model = load_model(out / model_file)
        report = evaluate(model.predict(test), test["class"].to_numpy(), name)
        write_json(report.to_dict(), out / report_file)
        accuracies[name] = report.persist.accuracy
    return {"accuracy": accuracies}


def _compare(cfg):
    out = Path(cfg.out_dir)
    reports = [EvalReport.from_dict(read_json(out / name, "report")) for name in (TREE_REPORT, LOGIT_REPORT)]
    table = compare(reports)
    (out / COMPARISON).write_text(render_comparison(table) + "\n", encoding="utf-8")
    result = {
        "models": [report.model for report in reports],
        "accuracy": {report.model: report.persist.accuracy for report in reports},
    }
    truth_edges = Path(cfg.out_dir) / CORPUS_DIR / TRUTH_EDGES_FILE
    if cfg.records is None and truth_edges.exists():
        test = read_features(out / TEST)[["source", "target"]]
        planted = pd.read_csv(truth_edges, dtype={"source": str, "target": str}, keep_default_na=False)
        matched = test.merge(planted, on=["source", "target"], how="inner")
        result["planted_bayes_rate"] = bayes_rate(matched["persist_probability"].to_numpy())
    write_json(result, out / COMPARISON_JSON)
    return result


def build_stages(cfg):
    """
    The ordered stages of one run with their files and parameters

    Args:
        cfg: PipelineConfig

    Returns:
        list of Stage
    """
    out = Path(cfg.out_dir)
    corpus = out / CORPUS_DIR
    graphs = (out / TAU1, out / f"{TAU1}.window.json", out / TAU2, out / f"{TAU2}.window.json")
    stages = []
    if cfg.records is None:
        stages.append(
            Stage(
                "synth",
                (),
                (corpus / RECORDS_FILE, corpus / TRUTH_FILE, corpus / TRUTH_EDGES_FILE),
                cfg.synth.to_dict(),
                _synth,
            )
        )
    compare_inputs = (out / TREE_REPORT, out / LOGIT_REPORT)
    if cfg.records is None:
        compare_inputs += (out / TEST, corpus / TRUTH_EDGES_FILE)
    stages.extend(
        [
            Stage(
                "ingest",
                (records_source(cfg),),
                (out / CALLS, out / INGEST_REPORT),
                {"ingest": cfg.ingest_config().to_dict(), "table": cfg.ingest},
                _ingest,
            ),
            Stage(
                "build",
                (out / CALLS,),
                graphs + (out / GRAPH_STATS, out / ROBOT_FILTER),
                {"window": cfg.window.to_dict(), "max_neighbors": cfg.max_neighbors, "neighbor_mode": cfg.neighbor_mode},
                _build,
            ),
            Stage(
                "features",
                graphs,
                (out / FEATURES,),
                {"persist_mode": cfg.features.persist_mode, "injn_mode": cfg.features.injn_mode},
                _features,
            ),
            Stage("summarize", (out / FEATURES,), (out / SUMMARY,), {}, _summarize),
            Stage(
                "correlate",
                (out / FEATURES,),
                (out / CORRELATIONS, out / CORRELATED_PAIRS),
                {"threshold": cfg.features.correlation_threshold},
                _correlate,
            ),
            Stage(
                "rank",
                (out / FEATURES,),
                (out / RANKING,),
                {
                    "mode": cfg.features.gain_mode,
                    "strategy": cfg.features.strategy,
                    "bins": cfg.features.bins,
                    "min_bucket": cfg.tree.min_leaf_size,
                },
                _rank,
            ),
            Stage("split", (out / FEATURES,), (out / TRAIN, out / TEST), cfg.split.to_dict(), _split),
            Stage(
                "train",
                (out / TRAIN,),
                (out / TREE_MODEL, out / LOGIT_MODEL),
                {"tree": cfg.tree.to_dict(), "logit": cfg.logit.to_dict()},
                _train,
            ),
            Stage(
                "evaluate",
                (out / TEST, out / TREE_MODEL, out / LOGIT_MODEL),
                (out / TREE_REPORT, out / LOGIT_REPORT),
                {},
                _evaluate,
            ),
            Stage("compare", compare_inputs, (out / COMPARISON, out / COMPARISON_JSON), {}, _compare),
        ]
    )
    return stages


def _key(path, out):
    path = Path(path)
    try:
        return path.relative_to(out).as_posix()
    except ValueError:
        return str(path)


def _hash_inputs(stage, out):
    hashes = {}
    for path in stage.inputs:
        if not Path(path).exists():
            raise DataError(f"Input '{path}' of stage '{stage.name}' does not exist")
        hashes[_key(path, out)] = file_sha256(path)
    return hashes


def _is_fresh(record, input_hashes, fingerprint, outputs, out):
    if not record or record.get("inputs") != input_hashes or record.get("params") != fingerprint:
        return False
    recorded = record.get("outputs", {})
    for path in outputs:
        key = _key(path, out)
        if not Path(path).exists() or recorded.get(key) != file_sha256(path):
            return False
    return True


def run_pipeline(cfg, resume=True):
    """
    Run every stage in order, skipping up-to-date stages when resuming

    A failing stage leaves a ``<stage>.partial`` marker in the output
    directory, keeps the outputs written so far and raises StageError.

    Args:
        cfg: PipelineConfig
        resume: reuse stages whose inputs, parameters and outputs are unchanged

    Returns:
        dict: the manifest written to ``manifest.json``
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / MANIFEST_FILE
    previous = read_json(manifest_path, "manifest").get("stages", {}) if resume and manifest_path.exists() else {}
    manifest = {
        "seed": cfg.seed,
        "versions": library_versions(),
        "config": cfg.to_dict(),
        "stages": {},
    }

    for stage in build_stages(cfg):
        marker = out / f"{stage.name}.partial"
        try:
            input_hashes = _hash_inputs(stage, out)
            fingerprint = params_fingerprint(stage.params)
            if resume and _is_fresh(previous.get(stage.name), input_hashes, fingerprint, stage.outputs, out):
                logger.info("Stage %s is up to date", stage.name)
                manifest["stages"][stage.name] = dict(previous[stage.name], status="skipped")
                continue
            logger.info("Running stage %s", stage.name, extra={"stage": stage.name})
            summary = stage.action(cfg)
            outputs = {_key(path, out): file_sha256(path) for path in stage.outputs}
        except Exception as exc:
            marker.write_text(f"{type(exc).__name__}: {exc}\n", encoding="utf-8")
            manifest["failed"] = stage.name
            write_json(manifest, manifest_path)
            logger.error("Stage %s failed: %s", stage.name, exc)
            raise StageError(stage.name, exc) from exc
        marker.unlink(missing_ok=True)
        manifest["stages"][stage.name] = {
            "status": "ran",
            "inputs": input_hashes,
            "params": fingerprint,
            "outputs": outputs,
            "summary": summary,
        }
        write_json(manifest, manifest_path)

    write_json(manifest, manifest_path)
    logger.info("Pipeline finished: %d stages", len(manifest["stages"]))
    return manifest
