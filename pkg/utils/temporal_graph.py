"""
Window graph construction, the robot filter and graph I/O.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx
import numpy as np
import pandas as pd

from models.window_graph import ARC_COLUMNS, NEIGHBOR_MODES, ArcStats, Window, WindowGraph
from utils.errors import DataError, UsageError

logger = logging.getLogger(__name__)

DEFAULT_MAX_NEIGHBORS = 50


def tally_arcs(records, window):
    """
    Aggregate calls inside ``window`` into per-arc statistics

    Args:
        records: iterable of CallRecord
        window: Window

    Returns:
        dict: (caller, callee) -> ArcStats
    """
    tally = {}
    for record in records:
        if not window.contains(record.timestamp):
            continue
        key = (record.caller, record.callee)
        stats = tally.get(key)
        if stats is None:
            tally[key] = ArcStats.single(record.timestamp, record.duration)
        else:
            stats.add_call(record.timestamp, record.duration)
    return tally


def merge_tallies(tallies):
    """Reduce partial arc tallies; order of the inputs does not affect the result."""
    merged = {}
    for tally in tallies:
        for key, stats in tally.items():
            current = merged.get(key)
            merged[key] = stats if current is None else current.merge(stats)
    return merged


def build_window_graph(records, window, threads=1):
    """
    Build the directed weighted graph of all calls inside one window

    Args:
        records: sequence of CallRecord (any order)
        window: Window
        threads: number of workers aggregating record chunks

    Returns:
        WindowGraph
    """
    if threads > 1:
        records = list(records)
        chunks = [records[k::threads] for k in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tally = merge_tallies(pool.map(lambda chunk: tally_arcs(chunk, window), chunks))
    else:
        tally = tally_arcs(records, window)
    graph = WindowGraph(window, tally)
    logger.info(
        "Built %s graph: %d vertices, %d arcs",
        window.name,
        graph.number_of_vertices(),
        graph.number_of_arcs(),
    )
    return graph


@dataclass(frozen=True)
class RobotFilterReport:
    """Vertices removed by the robot filter and the rule that removed them"""

    removed: frozenset
    max_neighbors: int
    neighbor_mode: str

    def to_dict(self):
        return {
            "max_neighbors": self.max_neighbors,
            "neighbor_mode": self.neighbor_mode,
            "removed_count": len(self.removed),
            "removed": sorted(self.removed),
        }


def neighbor_count(g, v, neighbor_mode="out"):
    if neighbor_mode == "out":
        return g.out_degree(v)
    if neighbor_mode == "total":
        return len(g.neighbors(v))
    raise UsageError(f"Unknown neighbor mode '{neighbor_mode}' (expected one of {NEIGHBOR_MODES})")


def exclude_vertices(g, vertices):
    """
    Drop vertices with all incident arcs, and any vertex left without arcs

    Args:
        g: WindowGraph
        vertices: collection of vertex ids

    Returns:
        WindowGraph: a new graph over the same window
    """
    vertices = set(vertices)
    kept = {
        key: stats
        for key, stats in g.arcs()
        if key[0] not in vertices and key[1] not in vertices
    }
    return WindowGraph(g.window, kept)


def apply_robot_filter(g, max_neighbors=DEFAULT_MAX_NEIGHBORS, neighbor_mode="out"):
    """
    Remove auto-dialer-like vertices

    A vertex is removed when its neighbor count reaches ``max_neighbors``;
    surviving out-degrees therefore lie in [0, max_neighbors - 1].

    Args:
        g: WindowGraph
        max_neighbors: smallest neighbor count that marks a robot
        neighbor_mode: "out" (distinct callees) or "total" (distinct alters either way)

    Returns:
        tuple: (filtered WindowGraph, RobotFilterReport)
    """
    if max_neighbors < 1:
        raise UsageError(f"max_neighbors must be positive, got {max_neighbors}")
    removed = frozenset(
        v for v in g.vertices if neighbor_count(g, v, neighbor_mode) >= max_neighbors
    )
    report = RobotFilterReport(removed, max_neighbors, neighbor_mode)
    if not removed:
        return g, report
    logger.info(
        "Robot filter removed %d vertices from %s (>= %d %s neighbors)",
        len(removed),
        g.window.name,
        max_neighbors,
        neighbor_mode,
    )
    return exclude_vertices(g, removed), report


class WindowSplit(NamedTuple):
    tau1: WindowGraph
    tau2: WindowGraph
    robot_filter: RobotFilterReport


def split_windows(records, cfg, max_neighbors=DEFAULT_MAX_NEIGHBORS, neighbor_mode="out", threads=1):
    """
    Build the filtered tau1 and tau2 graphs in a single pass over the records

    The robot set is decided on tau1 and removed from both windows.

    Args:
        records: iterable of CallRecord
        cfg: WindowConfig
        max_neighbors: robot filter threshold
        neighbor_mode: robot filter neighbor definition
        threads: workers for graph aggregation

    Returns:
        WindowSplit: (tau1, tau2, robot_filter)
    """
    tau1, tau2 = cfg.tau1, cfg.tau2
    first, second = [], []
    for record in records:
        if tau1.contains(record.timestamp):
            first.append(record)
        elif tau2.contains(record.timestamp):
            second.append(record)

    g1 = build_window_graph(first, tau1, threads=threads)
    g2 = build_window_graph(second, tau2, threads=threads)
    g1, report = apply_robot_filter(g1, max_neighbors, neighbor_mode)
    if report.removed:
        g2 = exclude_vertices(g2, report.removed)
    return WindowSplit(g1, g2, report)


@dataclass(frozen=True)
class GraphStatistics:
    """Basic network statistics of one window graph"""

    vertices: int
    arcs: int
    average_out_degree: float
    median_out_degree: float
    average_total_degree: float
    median_total_degree: float
    average_clustering: float
    median_clustering: float

    def to_dict(self):
        return dict(self.__dict__)


def graph_statistics(g):
    """
    Summarize vertex and arc counts, degrees and clustering

    Clustering is the local coefficient of the undirected projection; its
    average is taken over vertices with at least two distinct alters.

    Args:
        g: WindowGraph

    Returns:
        GraphStatistics
    """
    if g.number_of_vertices() == 0:
        return GraphStatistics(0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    vertices = sorted(g.vertices)
    out_degrees = np.array([g.out_degree(v) for v in vertices], dtype=float)
    total_degrees = np.array([len(g.neighbors(v)) for v in vertices], dtype=float)
    clustering = nx.clustering(g.graph.to_undirected(as_view=False))
    coefficients = np.array([clustering[v] for v in vertices], dtype=float)
    eligible = coefficients[total_degrees >= 2]
    return GraphStatistics(
        vertices=len(vertices),
        arcs=g.number_of_arcs(),
        average_out_degree=float(out_degrees.mean()),
        median_out_degree=float(np.median(out_degrees)),
        average_total_degree=float(total_degrees.mean()),
        median_total_degree=float(np.median(total_degrees)),
        average_clustering=float(eligible.mean()) if eligible.size else 0.0,
        median_clustering=float(np.median(coefficients)),
    )


def window_graph_frame(g):
    rows = [
        (i, j, s.call_count, s.first_call, s.last_call, s.total_duration) for (i, j), s in g.arcs()
    ]
    return pd.DataFrame(rows, columns=list(ARC_COLUMNS))


def write_window_graph(g, path):
    """
    Write an arc-list CSV plus a ``.window.json`` sidecar with the window bounds

    Args:
        g: WindowGraph
        path: CSV destination
    """
    window_graph_frame(g).to_csv(path, index=False)
    with open(f"{path}.window.json", "w", encoding="utf-8") as handle:
        json.dump(g.window.to_dict(), handle, indent=2, sort_keys=True)


def read_window_graph(path):
    """
    Read a graph written by ``write_window_graph``

    Args:
        path: arc-list CSV

    Returns:
        WindowGraph
    """
    try:
        with open(f"{path}.window.json", "r", encoding="utf-8") as handle:
            window = Window.from_dict(json.load(handle))
        frame = pd.read_csv(path, dtype={"i": str, "j": str}, keep_default_na=False)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"Cannot read window graph '{path}': {exc}")
    missing = set(ARC_COLUMNS) - set(frame.columns)
    if missing:
        raise DataError(f"Window graph '{path}' lacks columns {sorted(missing)}")
    arcs = {}
    columns = [frame[name].tolist() for name in ARC_COLUMNS]
    for i, j, count, first, last, duration in zip(*columns):
        arcs[(i, j)] = ArcStats(
            call_count=int(count),
            first_call=int(first),
            last_call=int(last),
            total_duration=int(duration),
        )
    return WindowGraph(window, arcs)
