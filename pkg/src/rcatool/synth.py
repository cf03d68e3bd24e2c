"""Synthetic plants, ground-truth causal graphs, and additive sensor data.

Stands in for the proprietary plant data: builds a random line topology,
samples a ground-truth DAG from the knowledge graph's candidate edges,
attaches scalar mechanisms to the edges, and draws observations variable
by variable in causal order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InfeasibleConfig, MalformedDocument
from .graphs import CausalEdge, CausalGraph
from .kg import (
    Edge,
    EdgeKind,
    KnowledgeGraph,
    Node,
    NodeKind,
    VariableRole,
    candidate_edges,
)

MECHANISM_KINDS = ("linear", "sigmoid", "sine", "quadratic")

# uniform sampling ranges for mechanism parameters; the scale factor a
# additionally gets a random sign
_PARAM_RANGES = {
    "linear": {"a": (0.8, 1.5)},
    "sigmoid": {"a": (1.5, 3.0), "b": (1.0, 3.0)},
    "sine": {"a": (1.5, 3.0), "b": (1.0, 2.0)},
    "quadratic": {"a": (0.4, 0.8)},
}


@dataclass(frozen=True)
class Mechanism:
    kind: str
    a: float
    b: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.a * x
        if self.kind == "sigmoid":
            return self.a * np.tanh(self.b * x)
        if self.kind == "sine":
            return self.a * np.sin(self.b * x)
        if self.kind == "quadratic":
            return self.a * (x * x - 1.0)
        raise ValueError(f"unknown mechanism kind {self.kind!r}")


@dataclass
class GroundTruth:
    graph: CausalGraph
    mechanisms: dict[tuple[str, str], Mechanism]
    noise_std: dict[str, float]

    def topological_order(self) -> list[str]:
        parents: dict[str, set[str]] = {v: set() for v in self.graph.variables}
        for e in self.graph.edges:
            parents[e.dst].add(e.src)
        order, placed = [], set()
        while len(order) < len(self.graph.variables):
            ready = sorted(
                v
                for v in self.graph.variables
                if v not in placed and parents[v] <= placed
            )
            if not ready:
                raise InfeasibleConfig("ground-truth graph contains a cycle")
            order.extend(ready)
            placed.update(ready)
        return order


@dataclass
class GeneratorConfig:
    stations: int = 3
    steps_per_station: tuple[int, int] = (1, 2)
    vars_per_step: tuple[int, int] = (2, 3)
    edge_density: float = 0.3
    root_fraction: float = 0.0
    leaf_fraction: float = 0.0
    irrelevant_fraction: float = 0.0
    noimpact_facts: int = 0
    noise_std: tuple[float, float] = (0.5, 1.0)
    mechanisms: tuple[str, ...] = MECHANISM_KINDS
    n_rows: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.stations < 1 or self.steps_per_station[0] < 1 or self.vars_per_step[0] < 1:
            raise InfeasibleConfig("all counts must be >= 1")
        if not 0 <= self.edge_density <= 1:
            raise InfeasibleConfig("edge_density must lie in [0, 1]")
        fr = self.root_fraction + self.leaf_fraction + self.irrelevant_fraction
        if min(self.root_fraction, self.leaf_fraction, self.irrelevant_fraction) < 0 or fr > 1:
            raise InfeasibleConfig("role fractions must be >= 0 and sum to <= 1")
        if self.n_rows < 1:
            raise InfeasibleConfig("n_rows must be >= 1")
        unknown = set(self.mechanisms) - set(MECHANISM_KINDS)
        if unknown:
            raise InfeasibleConfig(f"unknown mechanism kinds {sorted(unknown)}")


def generate_plant(cfg: GeneratorConfig) -> tuple[KnowledgeGraph, GroundTruth]:
    """Random line topology plus a ground truth drawn from its candidates."""
    rng = np.random.default_rng(cfg.seed)
    nodes = [Node("L1", NodeKind.LINE, "Line 1"), Node("P1", NodeKind.PRODUCT, "Product 1")]
    edges = [Edge("P1", EdgeKind.PRODUCED_ON, "L1")]
    step_vars: dict[str, list[str]] = {}
    var_ids: list[str] = []
    ps_counter = 0
    prev_station = None
    for s in range(1, cfg.stations + 1):
        st = f"ST{s}"
        nodes.append(Node(st, NodeKind.STATION, st))
        edges.append(Edge("L1", EdgeKind.HAS_STATION, st))
        if prev_station:
            edges.append(Edge(prev_station, EdgeKind.FOLLOWS_STATION, st))
        prev_station = st
        n_steps = int(rng.integers(cfg.steps_per_station[0], cfg.steps_per_station[1] + 1))
        prev_step = None
        for _ in range(n_steps):
            ps_counter += 1
            ps = f"PS{ps_counter}"
            nodes.append(Node(ps, NodeKind.PROCESS_STEP, ps))
            edges.append(Edge(st, EdgeKind.HAS_PROCESS_STEP, ps))
            if prev_step:
                edges.append(Edge(prev_step, EdgeKind.FOLLOWS_PROCESS_STEP, ps))
            prev_step = ps
            n_vars = int(rng.integers(cfg.vars_per_step[0], cfg.vars_per_step[1] + 1))
            step_vars[ps] = []
            for _ in range(n_vars):
                vid = f"V{len(var_ids) + 1:03d}"
                var_ids.append(vid)
                step_vars[ps].append(vid)
                nodes.append(Node(vid, NodeKind.SENSOR_VARIABLE, vid))
                edges.append(Edge(ps, EdgeKind.MEASURES, vid))

    roles: dict[str, VariableRole] = {}
    shuffled = list(rng.permutation(var_ids))
    n_root = int(round(cfg.root_fraction * len(var_ids)))
    n_leaf = int(round(cfg.leaf_fraction * len(var_ids)))
    n_irr = int(round(cfg.irrelevant_fraction * len(var_ids)))
    for v in shuffled[:n_root]:
        roles[v] = VariableRole.ROOT
    for v in shuffled[n_root : n_root + n_leaf]:
        roles[v] = VariableRole.LEAF
    for v in shuffled[n_root + n_leaf : n_root + n_leaf + n_irr]:
        roles[v] = VariableRole.IRRELEVANT

    kg = KnowledgeGraph(tuple(nodes), tuple(edges), roles)
    cs = candidate_edges(kg, "L1")

    # hidden within-step order fixes the orientation of same-step truth edges
    hidden_pos: dict[str, int] = {}
    counter = 0
    for ps in [p for p in step_vars]:
        for v in rng.permutation(step_vars[ps]):
            hidden_pos[str(v)] = counter
            counter += 1

    eligible = [
        (a, b) for a, b in cs.candidate_pairs() if hidden_pos[a] < hidden_pos[b]
    ]
    if cfg.edge_density > 0 and not eligible:
        raise InfeasibleConfig("edge density > 0 but no candidate pairs exist")
    mask = rng.random(len(eligible)) < cfg.edge_density
    true_edges = [pair for pair, m in zip(eligible, mask) if m]

    mechanisms = {}
    for a, b in true_edges:
        kind = str(rng.choice(list(cfg.mechanisms)))
        ranges = _PARAM_RANGES[kind]
        amp = float(rng.uniform(*ranges["a"])) * float(rng.choice([-1.0, 1.0]))
        freq = float(rng.uniform(*ranges["b"])) if "b" in ranges else 1.0
        mechanisms[(a, b)] = Mechanism(kind, amp, freq)
    noise_std = {
        v: float(rng.uniform(*cfg.noise_std)) for v in var_ids
    }
    truth = GroundTruth(
        CausalGraph(list(cs.variables), [CausalEdge(a, b) for a, b in true_edges]),
        mechanisms,
        noise_std,
    )

    if cfg.noimpact_facts:
        # assert known non-edges, never contradicting the sampled truth
        truth_set = set(true_edges)
        free = [p for p in cs.candidate_pairs() if p not in truth_set]
        take = min(cfg.noimpact_facts, len(free))
        picks = rng.choice(len(free), size=take, replace=False) if take else []
        extra = tuple(
            Edge(free[int(i)][0], EdgeKind.HAS_NO_IMPACT, free[int(i)][1])
            for i in sorted(int(i) for i in picks)
        )
        kg = KnowledgeGraph(kg.nodes, kg.edges + extra, kg.roles)

    return kg, truth


def sample_data(
    gt: GroundTruth,
    n: int,
    seed: int,
    product: str = "P1",
    start_hour: str = "2026-01-01T00:00:00",
) -> Dataset:
    """Draw observations variable by variable in causal order."""
    if n < 1:
        raise InfeasibleConfig("n must be >= 1")
    rng = np.random.default_rng(seed)
    cols = {v: None for v in gt.graph.variables}
    for v in gt.topological_order():
        acc = rng.normal(0.0, gt.noise_std.get(v, 1.0), size=n)
        for e in gt.graph.parents(v):
            acc = acc + gt.mechanisms[(e.src, e.dst)](cols[e.src])
        cols[v] = acc
    values = np.column_stack([cols[v] for v in gt.graph.variables])
    base = np.datetime64(start_hour)
    timestamps = [
        str(base + np.timedelta64(i, "m")) for i in range(n)
    ]
    return Dataset(list(gt.graph.variables), values, product, timestamps)


def truth_to_json(gt: GroundTruth) -> str:
    doc = {
        "variables": list(gt.graph.variables),
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "mechanism": {
                    "kind": gt.mechanisms[(e.src, e.dst)].kind,
                    "a": gt.mechanisms[(e.src, e.dst)].a,
                    "b": gt.mechanisms[(e.src, e.dst)].b,
                },
            }
            for e in sorted(gt.graph.edges, key=lambda e: (e.src, e.dst))
        ],
        "noise_std": dict(sorted(gt.noise_std.items())),
    }
    return json.dumps(doc, indent=2)


def truth_from_json(text: str) -> GroundTruth:
    try:
        doc = json.loads(text)
        edges = [CausalEdge(e["src"], e["dst"]) for e in doc["edges"]]
        mechanisms = {
            (e["src"], e["dst"]): Mechanism(
                e["mechanism"]["kind"], e["mechanism"]["a"], e["mechanism"].get("b", 1.0)
            )
            for e in doc["edges"]
        }
        return GroundTruth(
            CausalGraph(list(doc["variables"]), edges),
            mechanisms,
            {k: float(v) for k, v in doc["noise_std"].items()},
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise MalformedDocument(f"bad ground-truth document: {exc}") from exc
