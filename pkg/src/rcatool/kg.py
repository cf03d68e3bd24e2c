"""Embedded knowledge-graph store for plant topology and expert knowledge.

Holds typed nodes (lines, stations, process steps, sensor variables,
products) and typed edges, validates the schema, and derives the two
constraint products consumed by the learner: a temporal-spatial partial
order over sensor variables and a boolean candidate-edge matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    InvalidGraph,
    InvalidSequence,
    MalformedDocument,
    SelfBlacklist,
    UnknownLine,
    UnknownVariable,
)


class NodeKind(str, Enum):
    LINE = "Line"
    STATION = "Station"
    PROCESS_STEP = "ProcessStep"
    SENSOR_VARIABLE = "SensorVariable"
    PRODUCT = "Product"


class EdgeKind(str, Enum):
    HAS_STATION = "hasStation"
    HAS_PROCESS_STEP = "hasProcessStep"
    MEASURES = "measures"
    FOLLOWS_STATION = "followsStation"
    FOLLOWS_PROCESS_STEP = "followsProcessStep"
    HAS_NO_IMPACT = "hasNoImpact"
    PRODUCED_ON = "producedOn"


class VariableRole(str, Enum):
    NONE = "None"
    ROOT = "Root"
    LEAF = "Leaf"
    IRRELEVANT = "Irrelevant"


# (source kind, target kind) for each edge kind
EDGE_ENDPOINTS = {
    EdgeKind.HAS_STATION: (NodeKind.LINE, NodeKind.STATION),
    EdgeKind.HAS_PROCESS_STEP: (NodeKind.STATION, NodeKind.PROCESS_STEP),
    EdgeKind.MEASURES: (NodeKind.PROCESS_STEP, NodeKind.SENSOR_VARIABLE),
    EdgeKind.FOLLOWS_STATION: (NodeKind.STATION, NodeKind.STATION),
    EdgeKind.FOLLOWS_PROCESS_STEP: (NodeKind.PROCESS_STEP, NodeKind.PROCESS_STEP),
    EdgeKind.HAS_NO_IMPACT: (NodeKind.SENSOR_VARIABLE, NodeKind.SENSOR_VARIABLE),
    EdgeKind.PRODUCED_ON: (NodeKind.PRODUCT, NodeKind.LINE),
}

TOPOLOGY_EDGE_KINDS = frozenset(
    {
        EdgeKind.HAS_STATION,
        EdgeKind.HAS_PROCESS_STEP,
        EdgeKind.MEASURES,
        EdgeKind.FOLLOWS_STATION,
        EdgeKind.FOLLOWS_PROCESS_STEP,
        EdgeKind.PRODUCED_ON,
    }
)


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    name: str = ""


@dataclass(frozen=True)
class Edge:
    src: str
    kind: EdgeKind
    dst: str


@dataclass(frozen=True)
class SchemaViolation:
    rule: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.rule}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class BlacklistEdge:
    src: str
    dst: str


@dataclass(frozen=True)
class SetRole:
    variable: str
    role: VariableRole


FeedbackEvent = BlacklistEdge | SetRole


@dataclass(frozen=True)
class KnowledgeGraph:
    """Immutable typed graph; mutations produce a new revision."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    roles: dict[str, VariableRole] = field(default_factory=dict)
    revision: int = 1

    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    def edges_of_kind(self, kind: EdgeKind) -> list[Edge]:
        return [e for e in self.edges if e.kind == kind]

    def role_of(self, var_id: str) -> VariableRole:
        return self.roles.get(var_id, VariableRole.NONE)

    def has_edge(self, src: str, kind: EdgeKind, dst: str) -> bool:
        return Edge(src, kind, dst) in set(self.edges)

    def structurally_equal(self, other: "KnowledgeGraph") -> bool:
        roles_a = {k: v for k, v in self.roles.items() if v != VariableRole.NONE}
        roles_b = {k: v for k, v in other.roles.items() if v != VariableRole.NONE}
        return (
            set(self.nodes) == set(other.nodes)
            and set(self.edges) == set(other.edges)
            and roles_a == roles_b
        )


@dataclass
class ConstraintSet:
    """Derived learning constraints for the variables of one line.

    ``precedes[i, j]`` is strict temporal-spatial precedence of variable i
    over variable j; ``allowed[i, j]`` marks i -> j as a candidate edge.
    """

    variables: list[str]
    precedes: np.ndarray
    allowed: np.ndarray
    step_group: dict[str, str]

    def index(self, var_id: str) -> int:
        return self.variables.index(var_id)

    def candidate_pairs(self) -> list[tuple[str, str]]:
        out = []
        for i, a in enumerate(self.variables):
            for j, b in enumerate(self.variables):
                if self.allowed[i, j]:
                    out.append((a, b))
        return out


def validate(kg: KnowledgeGraph) -> list[SchemaViolation]:
    """Check every schema invariant; violations are data, not exceptions."""
    violations: list[SchemaViolation] = []

    seen: dict[str, Node] = {}
    for n in kg.nodes:
        if n.id in seen:
            violations.append(
                SchemaViolation("unique-id", n.id, "duplicate node id")
            )
        seen[n.id] = n
    nodes = seen

    for e in kg.edges:
        want_src, want_dst = EDGE_ENDPOINTS[e.kind]
        src, dst = nodes.get(e.src), nodes.get(e.dst)
        if src is None or dst is None:
            violations.append(
                SchemaViolation(
                    "dangling-edge",
                    f"{e.src}-[{e.kind.value}]->{e.dst}",
                    "edge endpoint is not a node",
                )
            )
            continue
        if src.kind != want_src or dst.kind != want_dst:
            violations.append(
                SchemaViolation(
                    "endpoint-kind",
                    f"{e.src}-[{e.kind.value}]->{e.dst}",
                    f"expected {want_src.value}->{want_dst.value}, "
                    f"got {src.kind.value}->{dst.kind.value}",
                )
            )

    # hasNoImpact is irreflexive
    for e in kg.edges_of_kind(EdgeKind.HAS_NO_IMPACT):
        if e.src == e.dst:
            violations.append(
                SchemaViolation("irreflexive", e.src, "hasNoImpact on itself")
            )

    # each sensor variable measured by exactly one process step
    measured: dict[str, list[str]] = {}
    for e in kg.edges_of_kind(EdgeKind.MEASURES):
        measured.setdefault(e.dst, []).append(e.src)
    for n in kg.nodes:
        if n.kind != NodeKind.SENSOR_VARIABLE:
            continue
        steps = measured.get(n.id, [])
        if len(steps) != 1:
            violations.append(
                SchemaViolation(
                    "measured-once",
                    n.id,
                    f"measured by {len(steps)} process steps, expected 1",
                )
            )

    # containment must be unambiguous for sequence checks
    station_line: dict[str, list[str]] = {}
    for e in kg.edges_of_kind(EdgeKind.HAS_STATION):
        station_line.setdefault(e.dst, []).append(e.src)
    for st, lines in station_line.items():
        if len(lines) > 1:
            violations.append(
                SchemaViolation("single-parent", st, "station in multiple lines")
            )
    step_station: dict[str, list[str]] = {}
    for e in kg.edges_of_kind(EdgeKind.HAS_PROCESS_STEP):
        step_station.setdefault(e.dst, []).append(e.src)
    for ps, stations in step_station.items():
        if len(stations) > 1:
            violations.append(
                SchemaViolation(
                    "single-parent", ps, "process step in multiple stations"
                )
            )

    # follows-edges form one total sequence per container
    for line_id in [n.id for n in kg.nodes if n.kind == NodeKind.LINE]:
        members = [e.dst for e in kg.edges_of_kind(EdgeKind.HAS_STATION) if e.src == line_id]
        violations.extend(
            _check_sequence(kg, line_id, members, EdgeKind.FOLLOWS_STATION)
        )
    for station_id in [n.id for n in kg.nodes if n.kind == NodeKind.STATION]:
        members = [
            e.dst
            for e in kg.edges_of_kind(EdgeKind.HAS_PROCESS_STEP)
            if e.src == station_id
        ]
        violations.extend(
            _check_sequence(kg, station_id, members, EdgeKind.FOLLOWS_PROCESS_STEP)
        )

    for var_id, role in kg.roles.items():
        n = nodes.get(var_id)
        if n is None or n.kind != NodeKind.SENSOR_VARIABLE:
            violations.append(
                SchemaViolation(
                    "role-target", var_id, "role assigned to a non sensor variable"
                )
            )

    return violations


def _check_sequence(
    kg: KnowledgeGraph, container: str, members: list[str], kind: EdgeKind
) -> list[SchemaViolation]:
    """Members plus their follows-edges must form a single simple path."""
    member_set = set(members)
    internal = [
        e for e in kg.edges_of_kind(kind) if e.src in member_set and e.dst in member_set
    ]
    violations = []
    out_deg: dict[str, int] = {m: 0 for m in members}
    in_deg: dict[str, int] = {m: 0 for m in members}
    for e in internal:
        out_deg[e.src] += 1
        in_deg[e.dst] += 1
    for m in members:
        if out_deg[m] > 1 or in_deg[m] > 1:
            violations.append(
                SchemaViolation(
                    "sequence-branch",
                    m,
                    f"{kind.value} branches inside {container}",
                )
            )
    if violations:
        return violations
    if members and len(internal) != len(members) - 1:
        violations.append(
            SchemaViolation(
                "sequence-total",
                container,
                f"{kind.value} edges do not form one total sequence "
                f"({len(internal)} edges over {len(members)} members)",
            )
        )
        return violations
    # degree <= 1 and n-1 edges: a cycle is the only remaining failure mode
    if members:
        try:
            _sequence_order(members, internal)
        except InvalidSequence:
            violations.append(
                SchemaViolation(
                    "sequence-cycle",
                    container,
                    f"{kind.value} contains a cycle or disconnected segment",
                )
            )
    return violations


def _sequence_order(members: list[str], internal: list[Edge]) -> list[str]:
    """Flatten a path of follows-edges into member order."""
    if not members:
        return []
    nxt = {e.src: e.dst for e in internal}
    has_pred = {e.dst for e in internal}
    starts = [m for m in members if m not in has_pred]
    if len(starts) != 1 and len(members) > 1:
        raise InvalidSequence(f"no unique sequence start among {sorted(members)}")
    cur = starts[0] if starts else members[0]
    order = [cur]
    while cur in nxt:
        cur = nxt[cur]
        if cur in order:
            raise InvalidSequence(f"cycle through {cur}")
        order.append(cur)
    if len(order) != len(members):
        raise InvalidSequence(f"sequence does not cover all of {sorted(members)}")
    return order


def line_step_sequence(kg: KnowledgeGraph, line_id: str) -> list[str]:
    """Process steps of a line, flattened into execution order."""
    nodes = kg.node_map()
    if line_id not in nodes or nodes[line_id].kind != NodeKind.LINE:
        raise UnknownLine(line_id)
    stations = [e.dst for e in kg.edges_of_kind(EdgeKind.HAS_STATION) if e.src == line_id]
    follows_st = [
        e
        for e in kg.edges_of_kind(EdgeKind.FOLLOWS_STATION)
        if e.src in set(stations) and e.dst in set(stations)
    ]
    steps: list[str] = []
    for st in _sequence_order(stations, follows_st):
        members = [
            e.dst for e in kg.edges_of_kind(EdgeKind.HAS_PROCESS_STEP) if e.src == st
        ]
        follows_ps = [
            e
            for e in kg.edges_of_kind(EdgeKind.FOLLOWS_PROCESS_STEP)
            if e.src in set(members) and e.dst in set(members)
        ]
        steps.extend(_sequence_order(members, follows_ps))
    return steps


def step_variables(kg: KnowledgeGraph, step_id: str) -> list[str]:
    """Sensor variables of one process step, id-sorted for determinism."""
    return sorted(
        e.dst for e in kg.edges_of_kind(EdgeKind.MEASURES) if e.src == step_id
    )


def derive_partial_order(kg: KnowledgeGraph, line_id: str) -> ConstraintSet:
    """Strict precedence between variables of earlier and later process steps.

    Variables measured in the same step stay mutually unordered.
    """
    steps = line_step_sequence(kg, line_id)
    variables: list[str] = []
    step_group: dict[str, str] = {}
    step_index: dict[str, int] = {}
    for idx, ps in enumerate(steps):
        for v in step_variables(kg, ps):
            variables.append(v)
            step_group[v] = ps
            step_index[v] = idx
    p = len(variables)
    precedes = np.zeros((p, p), dtype=bool)
    for i, a in enumerate(variables):
        for j, b in enumerate(variables):
            precedes[i, j] = step_index[a] < step_index[b]
    allowed = np.zeros((p, p), dtype=bool)
    return ConstraintSet(variables, precedes, allowed, step_group)


def candidate_edges(kg: KnowledgeGraph, line_id: str) -> ConstraintSet:
    """Candidate directed edges after all pruning rules.

    i -> j is a candidate iff i precedes j or they share a step, i is not a
    leaf or irrelevant variable, j is not a root or irrelevant variable,
    and no hasNoImpact(i, j) assertion exists.
    """
    cs = derive_partial_order(kg, line_id)
    forbidden = {
        (e.src, e.dst) for e in kg.edges_of_kind(EdgeKind.HAS_NO_IMPACT)
    }
    p = len(cs.variables)
    allowed = np.zeros((p, p), dtype=bool)
    for i, a in enumerate(cs.variables):
        for j, b in enumerate(cs.variables):
            if i == j:
                continue
            if not (cs.precedes[i, j] or cs.step_group[a] == cs.step_group[b]):
                continue
            if kg.role_of(a) in (VariableRole.LEAF, VariableRole.IRRELEVANT):
                continue
            if kg.role_of(b) in (VariableRole.ROOT, VariableRole.IRRELEVANT):
                continue
            if (a, b) in forbidden:
                continue
            allowed[i, j] = True
    cs.allowed = allowed
    return cs


def apply_feedback(kg: KnowledgeGraph, event: FeedbackEvent) -> KnowledgeGraph:
    """Fold one expert action into the graph and bump the revision."""
    var_ids = {n.id for n in kg.nodes if n.kind == NodeKind.SENSOR_VARIABLE}
    if isinstance(event, BlacklistEdge):
        if event.src == event.dst:
            raise SelfBlacklist(event.src)
        for v in (event.src, event.dst):
            if v not in var_ids:
                raise UnknownVariable(v)
        new_edge = Edge(event.src, EdgeKind.HAS_NO_IMPACT, event.dst)
        edges = kg.edges if new_edge in kg.edges else kg.edges + (new_edge,)
        return replace(kg, edges=edges, revision=kg.revision + 1)
    if isinstance(event, SetRole):
        if event.variable not in var_ids:
            raise UnknownVariable(event.variable)
        roles = dict(kg.roles)
        if event.role == VariableRole.NONE:
            roles.pop(event.variable, None)
        else:
            roles[event.variable] = event.role
        return replace(kg, roles=roles, revision=kg.revision + 1)
    raise TypeError(f"unsupported feedback event {event!r}")


def to_json(kg: KnowledgeGraph) -> str:
    """Canonical JSON: sorted nodes/edges/roles, stable key order."""
    doc = {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "name": n.name}
            for n in sorted(kg.nodes, key=lambda n: (n.kind.value, n.id))
        ],
        "edges": [
            {"src": e.src, "kind": e.kind.value, "dst": e.dst}
            for e in sorted(kg.edges, key=lambda e: (e.kind.value, e.src, e.dst))
        ],
        "roles": {
            v: r.value
            for v, r in sorted(kg.roles.items())
            if r != VariableRole.NONE
        },
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def save(kg: KnowledgeGraph) -> bytes:
    return to_json(kg).encode("utf-8")


def load(data: bytes | str) -> KnowledgeGraph:
    """Parse and validate the KG JSON document."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level value must be an object")
    for key in ("nodes", "edges", "roles"):
        if key not in doc:
            raise MalformedDocument(f"missing top-level field {key!r}")
    nodes = []
    for i, rec in enumerate(doc["nodes"]):
        try:
            kind = NodeKind(rec["kind"])
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedDocument(f"nodes[{i}]: bad node kind: {exc}") from exc
        if "id" not in rec:
            raise MalformedDocument(f"nodes[{i}]: missing id")
        nodes.append(Node(rec["id"], kind, rec.get("name", "")))
    edges = []
    for i, rec in enumerate(doc["edges"]):
        try:
            kind = EdgeKind(rec["kind"])
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedDocument(f"edges[{i}]: bad edge kind: {exc}") from exc
        if "src" not in rec or "dst" not in rec:
            raise MalformedDocument(f"edges[{i}]: missing src/dst")
        edges.append(Edge(rec["src"], kind, rec["dst"]))
    roles = {}
    for var, role in doc["roles"].items():
        try:
            roles[var] = VariableRole(role)
        except ValueError as exc:
            raise MalformedDocument(f"roles[{var!r}]: bad role: {exc}") from exc
    kg = KnowledgeGraph(tuple(nodes), tuple(edges), roles)
    violations = validate(kg)
    if violations:
        raise InvalidGraph(violations)
    return kg
