"""
Synthetic call logs with a planted persistence rule.

The generator wires a directed contact graph (lognormal out-degree budgets,
triadic closure, reciprocation), draws per-arc call counts and times inside
tau1, evaluates the planted logistic rule on the tau1 features computed by
the real feature extractor, and emits tau2 calls for the edges that persist.
Every random draw comes from a named substream of the seed, so the corpus is
fixed by the configuration alone.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import expit

from models.call_record import CallRecord, CallType
from models.edge import FEATURE_NAMES
from models.synth import DecayRule
from utils.cdr_ingest import write_records
from utils.edge_features import extract_features
from utils.errors import SynthError
from utils.evaluation import bayes_rate
from utils.files import file_sha256, read_json, write_json
from utils.temporal_graph import build_window_graph, graph_statistics

logger = logging.getLogger(__name__)

GENERATOR_TAG = "decaygraph.synth/1"
RECORDS_FILE = "records.csv"
TRUTH_FILE = "truth.json"
TRUTH_EDGES_FILE = "truth_edges.csv"
TRUTH_EDGE_COLUMNS = ("source", "target", "persist_probability", "persisted")

MEAN_CALL_DURATION = 150.0  # seconds

_STREAMS = ("degrees", "wiring", "rates", "timing", "durations", "labels", "tau2", "text")


def _streams(seed):
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(_STREAMS, children)}


def vertex_ids(n):
    width = max(5, len(str(n)))
    return [f"v{k:0{width}d}" for k in range(1, n + 1)]


def draw_out_degree_budgets(cfg, rng):
    """
    Heavy-tailed out-degree targets, rounded and clipped to [1, max_out_degree]

    Returns:
        numpy.ndarray of int, one budget per vertex
    """
    raw = rng.lognormal(cfg.degree_mu, cfg.degree_sigma, size=cfg.n_vertices)
    return np.clip(np.rint(raw), 1, cfg.max_out_degree).astype(int)


def wire_arcs(cfg, budgets, rng):
    """
    Directed contact graph grown with triadic closure and reciprocation

    Vertices draw targets in order until their budget is used. With
    probability ``triangle_boost`` the target is a contact of a contact,
    otherwise it is uniform. A target that already calls the vertex is never
    drawn, so mutual dyads only arise through reciprocation, which happens
    with probability ``reciprocity`` while the target has budget left.

    Returns:
        list of (source, target, partner) index triples; partner is the index
        of the arc being reciprocated, or -1
    """
    n = cfg.n_vertices
    out_sets = [set() for _ in range(n)]
    contacts = [[] for _ in range(n)]
    contact_sets = [set() for _ in range(n)]
    arcs = []

    def add(u, w, partner):
        out_sets[u].add(w)
        if w not in contact_sets[u]:
            contact_sets[u].add(w)
            contacts[u].append(w)
            contact_sets[w].add(u)
            contacts[w].append(u)
        arcs.append((u, w, partner))

    for v in range(n):
        budget = int(budgets[v])
        attempts = 0
        while len(out_sets[v]) < budget and attempts < 20 * budget:
            attempts += 1
            if contacts[v] and rng.random() < cfg.triangle_boost:
                u = contacts[v][int(rng.integers(len(contacts[v])))]
                t = contacts[u][int(rng.integers(len(contacts[u])))]
            else:
                t = int(rng.integers(n))
            if t == v or t in out_sets[v] or v in out_sets[t]:
                continue
            add(v, t, -1)
            if rng.random() < cfg.reciprocity and len(out_sets[t]) < budgets[t]:
                add(t, v, len(arcs) - 1)
    return arcs


def draw_call_rates(cfg, arcs, rng):
    """
    Lognormal call rate per arc; a reciprocating arc scales its partner's rate

    Returns:
        numpy.ndarray of float rates, aligned with ``arcs``
    """
    m = len(arcs)
    rates = rng.lognormal(cfg.call_rate_mu, cfg.call_rate_sigma, size=m)
    factors = rng.lognormal(0.0, cfg.reverse_rate_sigma, size=m)
    partners = np.array([partner for _, _, partner in arcs], dtype=int)
    mutual = partners >= 0
    rates[mutual] = rates[partners[mutual]] * factors[mutual]
    return rates


def draw_call_times(window, counts, rng):
    """
    Call times per arc inside one activity span of the window

    Each arc gets an onset skewed towards the window start and an end skewed
    towards the window end; its calls are uniform within that span.

    Returns:
        tuple: (arc index per call, integer timestamps)
    """
    m = counts.size
    onset = rng.beta(0.8, 2.0, size=m)
    end = onset + (1.0 - onset) * rng.beta(2.0, 0.8, size=m)
    owner = np.repeat(np.arange(m), counts)
    fractions = onset[owner] + (end[owner] - onset[owner]) * rng.random(owner.size)
    offsets = np.minimum(np.floor(fractions * window.length).astype(np.int64), window.length - 1)
    return owner, window.start + offsets


def _durations(size, rng):
    return np.rint(rng.exponential(MEAN_CALL_DURATION, size=size)).astype(np.int64)


def rule_scores(g1, edges, rule):
    """
    Linear part of the planted rule, without intercept, for each tau1 edge

    Args:
        g1: tau1 WindowGraph
        edges: list of (i, j) arcs of g1
        rule: DecayRule

    Returns:
        numpy.ndarray of float
    """
    names = list(rule.features)
    if not names or not edges:
        return np.zeros(len(edges))
    rows = [extract_features(g1, i, j).values() for i, j in edges]
    frame = pd.DataFrame(rows, columns=list(FEATURE_NAMES))
    beta = np.array([rule.coefficients[name] for name in names])
    return frame[names].to_numpy(dtype=float) @ beta


def calibrate_intercept(scores, target_decay_share):
    """
    Intercept making the expected share of decaying edges equal the target

    Raises:
        SynthError: when the target cannot be reached with this many edges
    """
    n = scores.size
    expected_decays = n * target_decay_share
    if expected_decays < 1 or expected_decays > n - 1:
        raise SynthError(
            f"A decay share of {target_decay_share:.3f} is unreachable with {n} edges",
            hint="Use a share strictly between 0 and 1 and enough vertices for both classes.",
        )
    target = 1.0 - target_decay_share
    lower = -float(scores.max()) - 40.0
    upper = -float(scores.min()) + 40.0

    def gap(intercept):
        return float(np.mean(expit(intercept + scores))) - target

    if gap(lower) > 0 or gap(upper) < 0:
        raise SynthError(f"Cannot calibrate the intercept to a decay share of {target_decay_share:.3f}")
    return float(brentq(gap, lower, upper, xtol=1e-12))


@dataclass
class SyntheticCorpus:
    records: list
    truth: dict
    truth_edges: pd.DataFrame


def generate(cfg):
    """
    Generate a call log for tau1 and tau2 with known persistence probabilities

    Args:
        cfg: SynthConfig

    Returns:
        SyntheticCorpus: records sorted by time, the truth description and the
        per-edge planted probabilities and outcomes
    """
    streams = _streams(cfg.seed)
    tau1, tau2 = cfg.window.tau1, cfg.window.tau2
    ids = vertex_ids(cfg.n_vertices)

    budgets = draw_out_degree_budgets(cfg, streams["degrees"])
    arcs = wire_arcs(cfg, budgets, streams["wiring"])
    if not arcs:
        raise SynthError("The generator produced no arcs", hint="Increase n_vertices.")
    rates = draw_call_rates(cfg, arcs, streams["rates"])
    counts = 1 + streams["rates"].poisson(rates)
    owner, times = draw_call_times(tau1, counts, streams["timing"])
    durations = _durations(owner.size, streams["durations"])

    sources = [ids[source] for source, _, _ in arcs]
    targets = [ids[target] for _, target, _ in arcs]
    records = [
        CallRecord(sources[a], targets[a], t, d)
        for a, t, d in zip(owner.tolist(), times.tolist(), durations.tolist())
    ]

    g1 = build_window_graph(records, tau1)
    edges = [key for key, _ in g1.arcs()]
    scores = rule_scores(g1, edges, cfg.rule)
    if cfg.target_decay_share is None:
        intercept = cfg.rule.intercept
    else:
        intercept = calibrate_intercept(scores, cfg.target_decay_share)
    probabilities = expit(intercept + scores)
    persisted = streams["labels"].random(len(edges)) < probabilities

    rate_of = {(sources[a], targets[a]): rates[a] for a in range(len(arcs))}
    kept = [edge for edge, flag in zip(edges, persisted) if flag]
    later_counts = 1 + streams["tau2"].poisson(np.array([rate_of[edge] for edge in kept], dtype=float))
    later_owner = np.repeat(np.arange(len(kept)), later_counts)
    later_times = tau2.start + streams["tau2"].integers(0, tau2.length, size=later_owner.size)
    later_durations = _durations(later_owner.size, streams["durations"])
    records.extend(
        CallRecord(kept[k][0], kept[k][1], t, d)
        for k, t, d in zip(later_owner.tolist(), later_times.tolist(), later_durations.tolist())
    )

    if cfg.text_share > 0:
        voice = len(records)
        n_text = int(round(voice * cfg.text_share / (1.0 - cfg.text_share)))
        rng = streams["text"]
        picks = rng.integers(0, len(arcs), size=n_text).tolist()
        stamps = rng.integers(tau1.start, tau2.end, size=n_text).tolist()
        records.extend(CallRecord(sources[a], targets[a], t, 0, CallType.TEXT) for a, t in zip(picks, stamps))

    records.sort(key=lambda record: (record.timestamp, record.caller, record.callee, record.call_type.value))

    truth_edges = pd.DataFrame(
        {
            "source": [i for i, _ in edges],
            "target": [j for _, j in edges],
            "persist_probability": probabilities,
            "persisted": persisted.astype(int),
        },
        columns=list(TRUTH_EDGE_COLUMNS),
    )
    decay_share = float(1.0 - persisted.mean())
    truth = {
        "generator": GENERATOR_TAG,
        "preset": cfg.preset,
        "seed": cfg.seed,
        "rule": DecayRule(coefficients=dict(cfg.rule.coefficients), intercept=intercept).to_dict(),
        "config": cfg.to_dict(),
        "window": cfg.window.to_dict(),
        "n_edges": len(edges),
        "decay_share": decay_share,
        "bayes_rate": bayes_rate(probabilities),
        "graph": graph_statistics(g1).to_dict(),
    }
    logger.info(
        "Generated %d records over %d tau1 edges (decay share %.3f, preset %s)",
        len(records),
        len(edges),
        decay_share,
        cfg.preset,
    )
    return SyntheticCorpus(records=records, truth=truth, truth_edges=truth_edges)


def write_corpus(corpus, directory):
    """
    Write ``records.csv``, ``truth_edges.csv`` and ``truth.json`` into a directory

    Returns:
        dict: artifact name -> Path
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records_path = directory / RECORDS_FILE
    write_records(corpus.records, records_path)
    edges_path = directory / TRUTH_EDGES_FILE
    corpus.truth_edges.to_csv(edges_path, index=False)
    truth = dict(corpus.truth)
    truth["records_file"] = RECORDS_FILE
    truth["records_sha256"] = file_sha256(records_path)
    truth_path = write_json(truth, directory / TRUTH_FILE)
    return {"records": records_path, "truth_edges": edges_path, "truth": truth_path}


def describe_truth(path):
    """
    Report the planted rule of a generated corpus

    Args:
        path: corpus directory, its ``truth.json`` or its record file

    Returns:
        dict: preset, seed, intercept, coefficients, features the rule depends on,
        target and realized decay share, planted Bayes rate

    Raises:
        SynthError: when the corpus was not produced by this generator or its
        records no longer match the recorded hash
    """
    path = Path(path)
    records_path = None
    if path.is_dir():
        truth_path = path / TRUTH_FILE
    elif path.suffix == ".json":
        truth_path = path
    else:
        truth_path = path.parent / TRUTH_FILE
        records_path = path
    if not truth_path.exists():
        raise SynthError(f"'{path}' has no {TRUTH_FILE}: not a corpus produced by this generator")
    truth = read_json(truth_path, "truth file")
    if truth.get("generator") != GENERATOR_TAG:
        raise SynthError(f"'{truth_path}' was not written by {GENERATOR_TAG}")
    if records_path is None:
        records_path = truth_path.parent / truth.get("records_file", RECORDS_FILE)
    if not records_path.exists() or file_sha256(records_path) != truth.get("records_sha256"):
        raise SynthError(
            f"Records '{records_path}' do not match the corpus described by '{truth_path}'",
            hint="The record file was modified or belongs to another corpus.",
        )
    rule = DecayRule.from_dict(truth["rule"])
    return {
        "preset": truth["preset"],
        "seed": truth["seed"],
        "intercept": rule.intercept,
        "coefficients": rule.to_dict()["coefficients"],
        "features": list(rule.features),
        "target_decay_share": truth["config"].get("target_decay_share"),
        "decay_share": truth["decay_share"],
        "bayes_rate": truth["bayes_rate"],
        "n_edges": truth["n_edges"],
        "records_sha256": truth["records_sha256"],
    }
