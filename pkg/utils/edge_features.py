"""
Per-edge feature extraction over the tau1 graph and persist/decay labeling from tau2.

Neighbor sets N(v) used by cn, injn and jnin are undirected contact sets;
in and jn follow arc direction. The focal pair is always excluded from
each other's neighbor sets.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import pandas as pd

from models.edge import (
    DECAY,
    EDGE_COLUMNS,
    FEATURE_NAMES,
    INJN_MODES,
    PERSIST,
    PERSIST_MODES,
    EdgeFeatureVector,
    LabeledEdge,
)
from utils.errors import DataError, UsageError

logger = logging.getLogger(__name__)


def _require_arc(g1, i, j):
    if not g1.has_arc(i, j):
        raise ValueError(f"Arc {i}->{j} is not present in the {g1.window.name} graph")


def vertex_features(g1, i, j):
    """
    Out-degree and outgoing call volume of both endpoints

    Args:
        g1: tau1 WindowGraph
        i: source vertex
        j: target vertex

    Returns:
        tuple: (d_i, d_j, c_i, c_j)
    """
    _require_arc(g1, i, j)
    return g1.out_degree(i), g1.out_degree(j), g1.out_calls(i), g1.out_calls(j)


def dyad_features(g1, i, j):
    """
    Call counts on the dyad in both directions and their shares of each caller's volume

    Args:
        g1: tau1 WindowGraph
        i: source vertex
        j: target vertex

    Returns:
        tuple: (c_ij, c_ji, p_ij, p_ji); p_ji is 0 when j placed no calls
    """
    _require_arc(g1, i, j)
    c_ij = g1.call_count(i, j)
    c_ji = g1.call_count(j, i)
    c_i = g1.out_calls(i)
    c_j = g1.out_calls(j)
    p_ij = c_ij / c_i
    p_ji = c_ji / c_j if c_j else 0.0
    return c_ij, c_ji, p_ij, p_ji


def neighborhood_features(g1, i, j, injn_mode="arcs"):
    """
    Embeddedness of the dyad

    Args:
        g1: tau1 WindowGraph
        i: source vertex
        j: target vertex
        injn_mode: "arcs" counts arcs between the neighborhoods, "calls" sums their calls

    Returns:
        tuple: (cn, in, jn, injn, jnin)
    """
    _require_arc(g1, i, j)
    if injn_mode not in INJN_MODES:
        raise UsageError(f"Unknown injn mode '{injn_mode}' (expected one of {INJN_MODES})")
    focal = {i, j}
    n_i = g1.neighbors(i) - focal
    n_j = g1.neighbors(j) - focal

    cn = len(n_i & n_j)
    in_ = sum(1 for v in n_i if g1.has_arc(v, j))
    jn = sum(1 for v in n_j if g1.has_arc(v, i))
    injn = _between(g1, n_i, n_j, injn_mode)
    jnin = _between(g1, n_j, n_i, injn_mode)
    return cn, in_, jn, injn, jnin


def _between(g1, sources, targets, mode):
    total = 0
    for u in sources:
        for v in g1.successors(u):
            if v in targets:
                total += 1 if mode == "arcs" else g1.call_count(u, v)
    return total


def temporal_features(g1, i, j):
    """
    Normalized times of the first and last i -> j call in the window

    Args:
        g1: tau1 WindowGraph
        i: source vertex
        j: target vertex

    Returns:
        tuple: (fdate, edate), 0 <= fdate <= edate <= 1
    """
    _require_arc(g1, i, j)
    stats = g1.arc(i, j)
    return g1.window.normalize(stats.first_call), g1.window.normalize(stats.last_call)


def extract_features(g1, i, j, injn_mode="arcs"):
    d_i, d_j, c_i, c_j = vertex_features(g1, i, j)
    c_ij, c_ji, p_ij, p_ji = dyad_features(g1, i, j)
    cn, in_, jn, injn, jnin = neighborhood_features(g1, i, j, injn_mode)
    fdate, edate = temporal_features(g1, i, j)
    return EdgeFeatureVector(
        d_i=d_i, d_j=d_j, c_i=c_i, c_j=c_j,
        c_ij=c_ij, c_ji=c_ji, p_ij=p_ij, p_ji=p_ji,
        cn=cn, in_=in_, jn=jn, injn=injn, jnin=jnin,
        fdate=fdate, edate=edate,
    )


def persisted(g2, i, j, persist_mode="directed"):
    """Whether the tau1 edge i -> j is observed again in tau2."""
    if persist_mode == "directed":
        return g2.has_arc(i, j)
    if persist_mode == "either":
        return g2.has_arc(i, j) or g2.has_arc(j, i)
    raise UsageError(f"Unknown persist mode '{persist_mode}' (expected one of {PERSIST_MODES})")


def label_edges(g1, g2, persist_mode="directed", injn_mode="arcs", threads=1):
    """
    Compute features for every tau1 arc and label it from tau2

    Args:
        g1: filtered tau1 WindowGraph
        g2: tau2 WindowGraph with the same robot vertices excluded
        persist_mode: "directed" (i -> j must recur) or "either" (a call in either direction)
        injn_mode: see neighborhood_features
        threads: workers computing features

    Returns:
        list of LabeledEdge sorted by (source, target)
    """
    if persist_mode not in PERSIST_MODES:
        raise UsageError(f"Unknown persist mode '{persist_mode}' (expected one of {PERSIST_MODES})")
    pairs = [key for key, _ in g1.arcs()]
    # Build the shared adjacency caches before any worker reads them.
    _ = (g1.undirected_neighbors, g1.out_call_totals)

    def label(pair):
        i, j = pair
        features = extract_features(g1, i, j, injn_mode)
        return LabeledEdge(i, j, features, PERSIST if persisted(g2, i, j, persist_mode) else DECAY)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            labeled = list(pool.map(label, pairs, chunksize=256))
    else:
        labeled = [label(pair) for pair in pairs]

    persisting = sum(edge.label for edge in labeled)
    logger.info(
        "Labeled %d edges: %d persist, %d decay",
        len(labeled),
        persisting,
        len(labeled) - persisting,
    )
    return labeled


def features_frame(edges):
    """
    Tabulate labeled edges in the feature-file column order

    Args:
        edges: sequence of LabeledEdge

    Returns:
        pandas.DataFrame with columns source, target, the 15 features, class
    """
    return pd.DataFrame([edge.to_row() for edge in edges], columns=list(EDGE_COLUMNS))


def as_feature_frame(data):
    """
    Accept a DataFrame, a sequence of LabeledEdge or a sequence of EdgeFeatureVector

    Returns:
        pandas.DataFrame containing at least the 15 feature columns
    """
    if isinstance(data, pd.DataFrame):
        missing = [name for name in FEATURE_NAMES if name not in data.columns]
        if missing:
            raise DataError(f"Feature table lacks columns {missing}")
        return data
    data = list(data)
    if data and isinstance(data[0], LabeledEdge):
        return features_frame(data)
    return pd.DataFrame([vector.values() for vector in data], columns=list(FEATURE_NAMES))


def write_features(edges, path):
    frame = edges if isinstance(edges, pd.DataFrame) else features_frame(edges)
    frame.to_csv(path, index=False)
    return len(frame)


def read_features(path):
    """
    Read a feature file and check its columns

    Args:
        path: CSV written by ``write_features``

    Returns:
        pandas.DataFrame
    """
    try:
        frame = pd.read_csv(path, dtype={"source": str, "target": str}, keep_default_na=False)
    except (OSError, ValueError) as exc:
        raise DataError(f"Cannot read feature file '{path}': {exc}")
    missing = [name for name in EDGE_COLUMNS if name not in frame.columns]
    if missing:
        raise DataError(f"Feature file '{path}' lacks columns {missing}")
    return frame
