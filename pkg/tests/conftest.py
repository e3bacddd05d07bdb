"""
Pytest configuration and fixtures for the decaygraph test suite.
"""

import os
import sys
from dataclasses import replace

# Add project root to Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import numpy as np
import pandas as pd
import pytest

from models.call_record import CallRecord, CallType
from models.edge import FEATURE_NAMES
from models.synth import preset
from models.window_graph import Window, WindowConfig
from utils.synth import generate
from utils.temporal_graph import build_window_graph


@pytest.fixture
def window():
    """
    Fixture providing a 1000-second window starting at 0
    """
    return Window("tau1", 0, 1000)


@pytest.fixture
def window_cfg():
    """
    Fixture providing two adjacent 1000-second windows
    """
    return WindowConfig(t0=0, delta1=1000, delta2=1000)


@pytest.fixture
def make_records():
    """
    Fixture providing a factory turning (caller, callee, timestamp[, duration]) tuples into CallRecords
    """

    def make(rows, call_type=CallType.VOICE):
        records = []
        for row in rows:
            caller, callee, timestamp = row[:3]
            duration = row[3] if len(row) > 3 else 60
            records.append(CallRecord(caller, callee, timestamp, duration, call_type))
        return records

    return make


@pytest.fixture
def make_graph(make_records, window):
    """
    Fixture providing a factory for a tau1 WindowGraph from call tuples
    """

    def make(rows, over=None):
        return build_window_graph(make_records(rows), over or window)

    return make


@pytest.fixture
def random_records():
    """
    Fixture providing a factory for random call logs over a small vertex set
    """

    def make(seed, n_vertices=30, n_calls=400, start=0, end=1000):
        rng = np.random.default_rng(seed)
        ids = [f"u{k:02d}" for k in range(n_vertices)]
        records = []
        while len(records) < n_calls:
            a, b = rng.integers(n_vertices, size=2)
            if a == b:
                continue
            timestamp = int(rng.integers(start, end))
            records.append(CallRecord(ids[a], ids[b], timestamp, int(rng.integers(0, 600))))
        return records

    return make


@pytest.fixture
def feature_table():
    """
    Fixture providing a factory for random feature tables whose class depends on c_ij only
    """

    def make(n=400, seed=0, noise=0.0):
        rng = np.random.default_rng(seed)
        data = {name: rng.integers(0, 20, size=n).astype(float) for name in FEATURE_NAMES}
        data["p_ij"] = rng.random(n)
        data["p_ji"] = rng.random(n)
        data["fdate"] = rng.random(n)
        data["edate"] = rng.random(n)
        signal = data["c_ij"] + noise * rng.normal(size=n)
        frame = pd.DataFrame(data, columns=list(FEATURE_NAMES))
        frame.insert(0, "target", [f"t{k}" for k in range(n)])
        frame.insert(0, "source", [f"s{k}" for k in range(n)])
        frame["class"] = (signal > 9.5).astype(int)
        return frame

    return make


@pytest.fixture(scope="session")
def small_corpus():
    """
    Fixture providing a small paperlike synthetic corpus, generated once per session
    """
    return generate(replace(preset("paperlike"), n_vertices=400, seed=11))
