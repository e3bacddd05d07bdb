from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from utils.errors import UsageError

ARC_COLUMNS = ("i", "j", "count", "first", "last", "duration")
NEIGHBOR_MODES = ("out", "total")


@dataclass(frozen=True, slots=True)
class Window:
    """
    A named half-open observation interval [start, end)
    """

    name: str
    start: int
    end: int

    def __post_init__(self):
        if self.end <= self.start:
            raise UsageError(f"Window {self.name} is empty: [{self.start}, {self.end})")

    @property
    def length(self):
        return self.end - self.start

    def contains(self, timestamp):
        return self.start <= timestamp < self.end

    def normalize(self, timestamp):
        """
        Position of a timestamp inside the window as a fraction of its length

        Args:
            timestamp: seconds since epoch, inside the window

        Returns:
            float: value in [0, 1)
        """
        return (timestamp - self.start) / self.length

    def to_dict(self):
        return {"name": self.name, "start": self.start, "end": self.end}

    @classmethod
    def from_dict(cls, data):
        return cls(name=data.get("name", "tau1"), start=int(data["start"]), end=int(data["end"]))


@dataclass(frozen=True)
class WindowConfig:
    """
    Two adjacent observation windows: tau1 = [t0, t0+delta1), tau2 = [t0+delta1, t0+delta1+delta2)
    """

    t0: int
    delta1: int
    delta2: int

    def __post_init__(self):
        if self.delta1 <= 0 or self.delta2 <= 0:
            raise UsageError(
                f"Window durations must be positive (delta1={self.delta1}, delta2={self.delta2})"
            )

    @property
    def tau1(self):
        return Window("tau1", self.t0, self.t0 + self.delta1)

    @property
    def tau2(self):
        return Window("tau2", self.t0 + self.delta1, self.t0 + self.delta1 + self.delta2)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(t0=int(data["t0"]), delta1=int(data["delta1"]), delta2=int(data["delta2"]))
        except KeyError as missing:
            raise UsageError(f"Window configuration needs {missing}")

    def to_dict(self):
        return {"t0": self.t0, "delta1": self.delta1, "delta2": self.delta2}


@dataclass(slots=True)
class ArcStats:
    """
    Aggregate of all calls on one directed pair inside one window
    """

    call_count: int
    first_call: int
    last_call: int
    total_duration: int

    @classmethod
    def single(cls, timestamp, duration):
        return cls(call_count=1, first_call=timestamp, last_call=timestamp, total_duration=duration)

    def add_call(self, timestamp, duration):
        self.call_count += 1
        self.first_call = min(self.first_call, timestamp)
        self.last_call = max(self.last_call, timestamp)
        self.total_duration += duration

    def merge(self, other):
        """Combine two partial tallies of the same arc (associative and commutative)."""
        return ArcStats(
            call_count=self.call_count + other.call_count,
            first_call=min(self.first_call, other.first_call),
            last_call=max(self.last_call, other.last_call),
            total_duration=self.total_duration + other.total_duration,
        )

    def to_attrs(self):
        return {
            "call_count": self.call_count,
            "first_call": self.first_call,
            "last_call": self.last_call,
            "total_duration": self.total_duration,
        }


class WindowGraph:
    """
    Directed weighted call graph of one observation window

    Arcs carry the ArcStats fields as networkx edge attributes; the vertex set
    is exactly the set of arc endpoints. Instances are treated as immutable
    once built, so the cached adjacency indexes stay valid.
    """

    def __init__(self, window, arcs=None):
        """
        Initialize a window graph

        Args:
            window: Window the arcs were observed in
            arcs: mapping (i, j) -> ArcStats
        """
        self.window = window
        self.graph = nx.DiGraph()
        for (source, target), stats in (arcs or {}).items():
            if stats.call_count < 1:
                raise ValueError(f"Arc {source}->{target} has no calls")
            self.graph.add_edge(source, target, **stats.to_attrs())

    @property
    def vertices(self):
        return frozenset(self.graph.nodes)

    def number_of_arcs(self):
        return self.graph.number_of_edges()

    def number_of_vertices(self):
        return self.graph.number_of_nodes()

    def has_arc(self, i, j):
        return self.graph.has_edge(i, j)

    def arc(self, i, j):
        attrs = self.graph.edges[i, j]
        return ArcStats(
            call_count=attrs["call_count"],
            first_call=attrs["first_call"],
            last_call=attrs["last_call"],
            total_duration=attrs["total_duration"],
        )

    def arcs(self):
        """
        Iterate over arcs in a deterministic (sorted) order

        Returns:
            iterator of ((i, j), ArcStats)
        """
        for i, j in sorted(self.graph.edges):
            yield (i, j), self.arc(i, j)

    def call_count(self, i, j):
        if not self.graph.has_edge(i, j):
            return 0
        return self.graph.edges[i, j]["call_count"]

    def out_degree(self, v):
        """Number of distinct callees of v (0 for vertices absent from the window)."""
        if v not in self.graph:
            return 0
        return self.graph.out_degree(v)

    def out_calls(self, v):
        """Total number of calls placed by v."""
        return self.out_call_totals.get(v, 0)

    @cached_property
    def out_call_totals(self):
        return dict(self.graph.out_degree(weight="call_count"))

    @cached_property
    def undirected_neighbors(self):
        """vertex -> frozenset of alters contacted in either direction"""
        index = {}
        for v in self.graph.nodes:
            index[v] = frozenset(self.graph.successors(v)) | frozenset(self.graph.predecessors(v))
        return index

    def neighbors(self, v):
        return self.undirected_neighbors.get(v, frozenset())

    def successors(self, v):
        if v not in self.graph:
            return iter(())
        return self.graph.successors(v)

    def total_calls(self):
        return sum(attrs["call_count"] for _, _, attrs in self.graph.edges(data=True))

    def arc_dict(self):
        return dict(self.arcs())

    def __eq__(self, other):
        if not isinstance(other, WindowGraph):
            return NotImplemented
        return self.window == other.window and self.arc_dict() == other.arc_dict()

    def __repr__(self):
        return (
            f"WindowGraph({self.window.name}, vertices={self.number_of_vertices()}, "
            f"arcs={self.number_of_arcs()})"
        )
