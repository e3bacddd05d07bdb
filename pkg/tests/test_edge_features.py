"""
Tests for per-edge feature extraction and persist/decay labeling
"""

import random
from collections import Counter, defaultdict

import pandas as pd
import pytest

from models.edge import DECAY, FEATURE_NAMES, PERSIST
from models.window_graph import Window, WindowConfig
from utils.edge_features import (
    dyad_features,
    extract_features,
    features_frame,
    label_edges,
    neighborhood_features,
    read_features,
    temporal_features,
    vertex_features,
    write_features,
)
from utils.errors import DataError, UsageError
from utils.temporal_graph import apply_robot_filter, build_window_graph, split_windows

TRIANGLE = [("A", "B", 1), ("B", "A", 2), ("A", "C", 3), ("C", "A", 4), ("B", "C", 5), ("C", "B", 6)]


def brute_force_features(records, window):
    """Every feature of every arc, computed straight from the call list"""
    calls = Counter()
    times = defaultdict(list)
    for r in records:
        if window.start <= r.timestamp < window.end:
            calls[(r.caller, r.callee)] += 1
            times[(r.caller, r.callee)].append(r.timestamp)
    arcs = set(calls)

    def out_degree(v):
        return sum(1 for (a, _) in arcs if a == v)

    def out_calls(v):
        return sum(n for (a, _), n in calls.items() if a == v)

    def contacts(v):
        return {b for (a, b) in arcs if a == v} | {a for (a, b) in arcs if b == v}

    table = {}
    for i, j in arcs:
        n_i = contacts(i) - {i, j}
        n_j = contacts(j) - {i, j}
        c_i, c_j = out_calls(i), out_calls(j)
        table[(i, j)] = {
            "d_i": out_degree(i),
            "d_j": out_degree(j),
            "c_i": c_i,
            "c_j": c_j,
            "c_ij": calls[(i, j)],
            "c_ji": calls[(j, i)],
            "p_ij": calls[(i, j)] / c_i,
            "p_ji": calls[(j, i)] / c_j if c_j else 0.0,
            "cn": len(n_i & n_j),
            "in": sum(1 for v in n_i if (v, j) in arcs),
            "jn": sum(1 for v in n_j if (v, i) in arcs),
            "injn": sum(1 for u in n_i for v in n_j if (u, v) in arcs),
            "jnin": sum(1 for u in n_j for v in n_i if (u, v) in arcs),
            "fdate": (min(times[(i, j)]) - window.start) / window.length,
            "edate": (max(times[(i, j)]) - window.start) / window.length,
        }
    return table


def test_vertex_features_with_a_silent_target(make_graph):
    """Test degrees and call volumes when j never calls"""
    g = make_graph([("A", "B", 1), ("A", "B", 2), ("A", "B", 3), ("A", "C", 4)])
    assert vertex_features(g, "A", "B") == (2, 0, 4, 0)


def test_dyad_features(make_graph):
    """Test call shares and the zero convention for a silent target"""
    g = make_graph([("A", "B", t) for t in (1, 2)] + [("A", "C", t) for t in range(10, 18)])
    assert dyad_features(g, "A", "B") == (2, 0, 0.2, 0.0)


def test_call_shares_sum_to_one(random_records, window):
    """Test p_ij over all arcs of a source adds up to one"""
    g = build_window_graph(random_records(seed=4), window)
    shares = defaultdict(float)
    for (i, j), _ in g.arcs():
        shares[i] += dyad_features(g, i, j)[2]
    for total in shares.values():
        assert total == pytest.approx(1.0, abs=1e-12)


def test_triangle_neighborhood(make_graph):
    """Test embeddedness counts on a single reciprocated triangle"""
    g = make_graph(TRIANGLE)
    assert neighborhood_features(g, "A", "B") == (1, 1, 1, 0, 0)


def test_bridge_between_two_stars_has_no_common_neighbors(make_graph):
    """Test the arc joining two disjoint stars"""
    rows = [("A", leaf, 1) for leaf in ("a1", "a2", "a3")]
    rows += [("B", leaf, 2) for leaf in ("b1", "b2")]
    rows += [("A", "B", 3)]
    g = make_graph(rows)
    cn, in_, jn, injn, jnin = neighborhood_features(g, "A", "B")
    assert (cn, in_, jn, injn, jnin) == (0, 0, 0, 0, 0)


def test_injn_counts_arcs_or_calls(make_graph):
    """Test second-order embeddedness in both counting modes"""
    rows = [("A", "B", 1), ("A", "x", 2), ("B", "y", 3), ("x", "y", 4), ("x", "y", 5), ("y", "x", 6)]
    g = make_graph(rows)
    assert neighborhood_features(g, "A", "B", injn_mode="arcs")[3:] == (1, 1)
    assert neighborhood_features(g, "A", "B", injn_mode="calls")[3:] == (2, 1)
    with pytest.raises(UsageError):
        neighborhood_features(g, "A", "B", injn_mode="weights")


def test_temporal_features(make_graph):
    """Test normalized first and last call times"""
    g = make_graph([("A", "B", 0), ("A", "B", 750), ("C", "D", 500)])
    assert temporal_features(g, "A", "B") == (0.0, 0.75)
    assert temporal_features(g, "C", "D") == (0.5, 0.5)


def test_missing_arc_is_rejected(make_graph):
    """Test features are only defined for tau1 arcs"""
    g = make_graph(TRIANGLE)
    with pytest.raises(ValueError):
        extract_features(g, "A", "Z")


def test_features_match_a_brute_force_oracle(random_records):
    """Test all fifteen features on fifty random graphs against direct enumeration"""
    window = Window("tau1", 0, 1000)
    for seed in range(50):
        rng = random.Random(seed)
        records = random_records(seed=seed, n_vertices=rng.randint(5, 50), n_calls=rng.randint(20, 400), end=1200)
        g = build_window_graph(records, window)
        expected = brute_force_features(records, window)
        assert set(expected) == {key for key, _ in g.arcs()}
        for (i, j), values in expected.items():
            assert extract_features(g, i, j).as_dict() == values, (seed, i, j)


def test_features_ignore_arc_insertion_order(random_records, window):
    """Test features do not depend on the order calls were added"""
    records = random_records(seed=12)
    shuffled = list(records)
    random.Random(0).shuffle(shuffled)
    a = build_window_graph(records, window)
    b = build_window_graph(shuffled, window)
    for (i, j), _ in a.arcs():
        assert extract_features(a, i, j) == extract_features(b, i, j)


def test_feature_invariants_after_robot_filter(random_records, window):
    """Test bounds that every labeled edge satisfies"""
    g, _ = apply_robot_filter(build_window_graph(random_records(seed=21, n_vertices=40, n_calls=600), window), 14)
    for (i, j), _ in g.arcs():
        f = extract_features(g, i, j)
        assert f.c_ij <= f.c_i and f.c_ji <= f.c_j
        assert f.cn <= min(len(g.neighbors(i) - {j}), len(g.neighbors(j) - {i}))
        assert 0.0 <= f.fdate <= f.edate <= 1.0
        assert 1 <= f.d_i <= 13


def test_directed_labels(make_records):
    """Test an edge persists only if the same directed pair recurs in tau2"""
    cfg = WindowConfig(t0=0, delta1=100, delta2=100)
    rows = [("A", "B", 10), ("C", "D", 20), ("E", "F", 30), ("A", "B", 150), ("D", "C", 160)]
    windows = split_windows(make_records(rows), cfg)
    labels = {(e.source, e.target): e.label for e in label_edges(windows.tau1, windows.tau2)}
    assert labels == {("A", "B"): PERSIST, ("C", "D"): DECAY, ("E", "F"): DECAY}

    either = label_edges(windows.tau1, windows.tau2, persist_mode="either")
    assert {(e.source, e.target): e.label for e in either}[("C", "D")] == PERSIST
    with pytest.raises(UsageError):
        label_edges(windows.tau1, windows.tau2, persist_mode="sometimes")


def test_labels_match_tau2_membership(random_records, window_cfg):
    """Test labels against a direct tau2 lookup, for any thread count"""
    records = random_records(seed=30, n_vertices=25, n_calls=800, start=0, end=2000)
    windows = split_windows(records, window_cfg)
    tau2_pairs = {(r.caller, r.callee) for r in records if window_cfg.tau2.contains(r.timestamp)}
    edges = label_edges(windows.tau1, windows.tau2)
    assert [(e.source, e.target) for e in edges] == sorted(key for key, _ in windows.tau1.arcs())
    for edge in edges:
        assert edge.label == int((edge.source, edge.target) in tau2_pairs)
    assert label_edges(windows.tau1, windows.tau2, threads=4) == edges


def test_feature_file_round_trip(tmp_path, random_records, window_cfg):
    """Test the feature file keeps column order and ids"""
    windows = split_windows(random_records(seed=31, start=0, end=2000), window_cfg)
    edges = label_edges(windows.tau1, windows.tau2)
    path = tmp_path / "features.csv"
    assert write_features(edges, path) == len(edges)
    frame = read_features(path)
    assert list(frame.columns) == ["source", "target", *FEATURE_NAMES, "class"]
    pd.testing.assert_frame_equal(frame, features_frame(edges), check_dtype=False)

    pd.DataFrame({"source": ["a"], "target": ["b"]}).to_csv(tmp_path / "bad.csv", index=False)
    with pytest.raises(DataError):
        read_features(tmp_path / "bad.csv")
