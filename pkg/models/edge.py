from dataclasses import astuple, dataclass, fields

# Column names as written to feature files, in table order.
FEATURE_NAMES = (
    "d_i", "d_j", "c_i", "c_j",
    "c_ij", "c_ji", "p_ij", "p_ji",
    "cn", "in", "jn", "injn", "jnin",
    "fdate", "edate",
)

FEATURE_GROUPS = {
    "vertex": ("d_i", "d_j", "c_i", "c_j"),
    "dyad": ("c_ij", "c_ji", "p_ij", "p_ji"),
    "neighborhood": ("cn", "in", "jn", "injn", "jnin"),
    "temporal": ("fdate", "edate"),
}

FEATURE_DESCRIPTIONS = {
    "d_i": "Out degree of i (ego-network range)",
    "d_j": "Out degree of j (ego-network range)",
    "c_i": "Number of calls made by i (gregariousness)",
    "c_j": "Number of calls made by j (gregariousness)",
    "c_ij": "Calls from i to j (directed edge strength)",
    "c_ji": "Calls from j to i (reciprocated edge strength)",
    "p_ij": "Proportion of i's calls that go to j",
    "p_ji": "Proportion of j's calls that go to i",
    "cn": "Common neighbors of i and j (edge embeddedness)",
    "in": "Neighbors of i that call j (directed embeddedness)",
    "jn": "Neighbors of j that call i (directed embeddedness)",
    "injn": "Arcs from i's neighbors to j's neighbors (2nd order embeddedness)",
    "jnin": "Arcs from j's neighbors to i's neighbors (2nd order embeddedness)",
    "fdate": "Normalized time of first call from i to j (edge newness)",
    "edate": "Normalized time of last call from i to j (edge freshness)",
}

PERSIST = 1
DECAY = 0
CLASS_NAMES = {PERSIST: "persist", DECAY: "decay"}

EDGE_COLUMNS = ("source", "target") + FEATURE_NAMES + ("class",)

INJN_MODES = ("arcs", "calls")
PERSIST_MODES = ("directed", "either")


def feature_group(name):
    for group, members in FEATURE_GROUPS.items():
        if name in members:
            return group
    return None


@dataclass(frozen=True, slots=True)
class EdgeFeatureVector:
    """
    The fifteen tau1 features of one directed edge i -> j

    ``in_`` is stored with a trailing underscore because ``in`` is a keyword;
    it is written as ``in`` everywhere outside Python.
    """

    d_i: int
    d_j: int
    c_i: int
    c_j: int
    c_ij: int
    c_ji: int
    p_ij: float
    p_ji: float
    cn: int
    in_: int
    jn: int
    injn: int
    jnin: int
    fdate: float
    edate: float

    def values(self):
        return astuple(self)

    def as_dict(self):
        return dict(zip(FEATURE_NAMES, self.values()))

    @classmethod
    def from_dict(cls, data):
        kwargs = {}
        for f, name in zip(fields(cls), FEATURE_NAMES):
            kwargs[f.name] = data[name]
        return cls(**kwargs)


@dataclass(frozen=True, slots=True)
class LabeledEdge:
    """
    A tau1 edge with its features and its tau2 outcome (1 persist, 0 decay)
    """

    source: str
    target: str
    features: EdgeFeatureVector
    label: int

    def to_row(self):
        return (self.source, self.target) + self.features.values() + (self.label,)

    def as_dict(self):
        return dict(zip(EDGE_COLUMNS, self.to_row()))
