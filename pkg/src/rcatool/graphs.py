"""Weighted causal DAGs, path queries, and the partial-truth distance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import MalformedDocument, UnknownVariable

PATH_CAP = 1000


@dataclass(frozen=True)
class CausalEdge:
    src: str
    dst: str
    strength: float = 1.0


@dataclass
class CausalGraph:
    variables: list[str]
    edges: list[CausalEdge]

    def edge_set(self) -> set[tuple[str, str]]:
        return {(e.src, e.dst) for e in self.edges}

    def parents(self, var: str) -> list[CausalEdge]:
        return [e for e in self.edges if e.dst == var]

    def strength(self, src: str, dst: str) -> float:
        for e in self.edges:
            if e.src == src and e.dst == dst:
                return e.strength
        raise KeyError((src, dst))

    def is_acyclic(self) -> bool:
        children: dict[str, list[str]] = {v: [] for v in self.variables}
        for e in self.edges:
            children[e.src].append(e.dst)
        state: dict[str, int] = {}

        def visit(v: str) -> bool:
            if state.get(v) == 1:
                return False
            if state.get(v) == 2:
                return True
            state[v] = 1
            ok = all(visit(c) for c in children[v])
            state[v] = 2
            return ok

        return all(visit(v) for v in self.variables)


def graph_to_json(g: CausalGraph) -> str:
    doc = {
        "variables": list(g.variables),
        "edges": [
            {"src": e.src, "dst": e.dst, "strength": e.strength}
            for e in sorted(g.edges, key=lambda e: (e.src, e.dst))
        ],
    }
    return json.dumps(doc, indent=2)


def graph_from_json(text: str) -> CausalGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    try:
        edges = [
            CausalEdge(e["src"], e["dst"], float(e.get("strength", 1.0)))
            for e in doc["edges"]
        ]
        return CausalGraph(list(doc["variables"]), edges)
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"bad causal graph document: {exc}") from exc


@dataclass
class RootCausePaths:
    fault: str
    paths: list[list[str]]  # each ends at the fault variable
    strengths: list[float]
    contributing: dict[str, float] = field(default_factory=dict)  # var -> max path strength
    truncated: bool = False


def root_cause_paths(g: CausalGraph, fault: str, cap: int = PATH_CAP) -> RootCausePaths:
    """All simple directed paths ending at the fault, strongest first."""
    if fault not in g.variables:
        raise UnknownVariable(fault)
    found: list[tuple[list[str], float]] = []

    def walk(suffix: list[str], strength: float):
        head = suffix[0]
        found.append((list(suffix), strength))
        for e in g.parents(head):
            if e.src not in suffix:
                walk([e.src] + suffix, strength * e.strength)

    for e in g.parents(fault):
        walk([e.src, fault], e.strength)
    found.sort(key=lambda item: (-item[1], item[0]))
    truncated = len(found) > cap
    found = found[:cap]
    contributing: dict[str, float] = {}
    for path, s in found:
        for v in path[:-1]:
            contributing[v] = max(contributing.get(v, 0.0), s)
    return RootCausePaths(
        fault,
        [p for p, _ in found],
        [s for _, s in found],
        contributing,
        truncated,
    )


@dataclass
class PartialGraph:
    """Ground truth known only on a subset of ordered pairs.

    ``known[(a, b)]`` is True when the edge a -> b exists and False when it
    is known to be absent; unlisted pairs carry no information.
    """

    variables: list[str]
    known: dict[tuple[str, str], bool]

    @classmethod
    def complete(cls, g: CausalGraph) -> "PartialGraph":
        known = {}
        es = g.edge_set()
        for a in g.variables:
            for b in g.variables:
                if a != b:
                    known[(a, b)] = (a, b) in es
        return cls(list(g.variables), known)


def ashd(learned: CausalGraph, truth: PartialGraph) -> int:
    """Structural Hamming distance restricted to the known pairs.

    Per unordered pair with any known direction: one point for a missing
    true edge, an extra learned edge, or a reversed edge.
    """
    for a, b in truth.known:
        if a not in learned.variables or b not in learned.variables:
            raise UnknownVariable(f"{a if a not in learned.variables else b}")
    les = learned.edge_set()
    pairs = {frozenset((a, b)) for a, b in truth.known}
    total = 0
    for pair in pairs:
        a, b = sorted(pair)
        t_ab, t_ba = truth.known.get((a, b)), truth.known.get((b, a))
        l_ab, l_ba = (a, b) in les, (b, a) in les
        if t_ab:
            total += 0 if l_ab else 1  # reversed or missing, one point either way
        elif t_ba:
            total += 0 if l_ba else 1
        else:
            # only absence is known; any learned edge in a known-absent
            # direction is an extra
            extra_ab = l_ab and t_ab is False
            extra_ba = l_ba and t_ba is False
            total += 1 if (extra_ab or extra_ba) else 0
    return total
