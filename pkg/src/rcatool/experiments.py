"""Desk-scale reproductions of the three evaluation studies.

The knowledge-graph fraction studies retain a random share of the
constraint-bearing facts (role assignments, hasNoImpact assertions, and
cross-step precedence declarations) and compare learning time and learned
edge counts. The feedback study measures the partial-truth distance
before and after one correct hasNoImpact assertion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .graphs import PartialGraph, ashd
from .kg import ConstraintSet, EdgeKind, KnowledgeGraph, VariableRole, derive_partial_order
from .learner import LearnParams, learn_with_constraints
from .preprocess import preprocess
from .synth import GeneratorConfig, GroundTruth, generate_plant, sample_data


@dataclass
class ExperimentRow:
    condition: str
    seed: int
    learn_ms: float
    edges: int
    ashd: float | None = None
    candidate_edges: int | None = None

    def csv(self) -> str:
        a = "" if self.ashd is None else f"{self.ashd}"
        return f"{self.condition},{self.seed},{self.learn_ms:.3f},{self.edges},{a}"


CSV_HEADER = "condition,seed,learn_ms,edges,ashd"


def kg_facts(kg: KnowledgeGraph, line_id: str) -> list[tuple]:
    """Constraint-bearing facts: roles, hasNoImpact edges, and one
    precedence declaration per cross-step variable pair."""
    cs = derive_partial_order(kg, line_id)
    facts: list[tuple] = []
    for v, r in sorted(kg.roles.items()):
        if r != VariableRole.NONE:
            facts.append(("role", v, r))
    for e in sorted(kg.edges_of_kind(EdgeKind.HAS_NO_IMPACT), key=lambda e: (e.src, e.dst)):
        facts.append(("noimpact", e.src, e.dst))
    for i, a in enumerate(cs.variables):
        for j, b in enumerate(cs.variables):
            if cs.precedes[i, j]:
                facts.append(("prec", a, b))
    return facts


def constraints_from_facts(
    kg: KnowledgeGraph, line_id: str, facts: list[tuple]
) -> ConstraintSet:
    """Candidate-edge matrix as if only the given facts were modeled.

    Pairs without a retained precedence declaration count as unordered, so
    both directions stay in the search space.
    """
    cs = derive_partial_order(kg, line_id)
    p = len(cs.variables)
    idx = {v: i for i, v in enumerate(cs.variables)}
    precedes = np.zeros((p, p), dtype=bool)
    roles: dict[str, VariableRole] = {}
    noimpact: set[tuple[str, str]] = set()
    for fact in facts:
        if fact[0] == "prec":
            precedes[idx[fact[1]], idx[fact[2]]] = True
        elif fact[0] == "role":
            roles[fact[1]] = fact[2]
        elif fact[0] == "noimpact":
            noimpact.add((fact[1], fact[2]))
    # transitive closure keeps the retained declarations a valid partial order
    for k in range(p):
        precedes |= precedes[:, k : k + 1] & precedes[k : k + 1, :]
    allowed = np.zeros((p, p), dtype=bool)
    for i, a in enumerate(cs.variables):
        for j, b in enumerate(cs.variables):
            if i == j or precedes[j, i]:
                continue
            if roles.get(a) in (VariableRole.LEAF, VariableRole.IRRELEVANT):
                continue
            if roles.get(b) in (VariableRole.ROOT, VariableRole.IRRELEVANT):
                continue
            if (a, b) in noimpact:
                continue
            allowed[i, j] = True
    return ConstraintSet(cs.variables, precedes, allowed, cs.step_group)


def sample_facts(facts: list[tuple], fraction: float, rng: np.random.Generator) -> list[tuple]:
    take = int(round(fraction * len(facts)))
    if take >= len(facts):
        return list(facts)
    picks = rng.choice(len(facts), size=take, replace=False)
    return [facts[i] for i in sorted(int(i) for i in picks)]


def run_kg_fraction(
    cfg: GeneratorConfig,
    fractions: list[float],
    repeats: int,
    params: LearnParams | None = None,
) -> list[ExperimentRow]:
    """Learning time and learned edge count per retained-fact fraction."""
    params = params or LearnParams(search_mode="greedy")
    kg, truth = generate_plant(cfg)
    facts = kg_facts(kg, "L1")
    rows = []
    for fraction in sorted(fractions):
        for r in range(repeats):
            seed = cfg.seed * 1000 + r
            ds, _ = preprocess(sample_data(truth, cfg.n_rows, seed))
            rng = np.random.default_rng(seed + int(fraction * 1e6))
            cs = constraints_from_facts(kg, "L1", sample_facts(facts, fraction, rng))
            graph, report = learn_with_constraints(ds, cs, params)
            rows.append(
                ExperimentRow(
                    condition=f"{fraction:g}",
                    seed=seed,
                    learn_ms=report.learn_ms,
                    edges=len(graph.edges),
                    candidate_edges=report.candidate_edges,
                )
            )
    return rows


def run_feedback(
    n_samples: int = 100,
    n_rows: int = 300,
    seed: int = 0,
    params: LearnParams | None = None,
    known_pair_fraction: float = 0.5,
    vars_per_step: int = 2,
) -> list[ExperimentRow]:
    """Distance to partial truth before/after one correct hasNoImpact.

    Each sample is an eight-variable sub-plant; the blacklisted pair is a
    spurious learned edge when one exists, else a random non-edge.
    """
    params = params or LearnParams(search_mode="greedy", prune_threshold=0.05)
    rows = []
    for s in range(n_samples):
        sample_seed = seed * 100_000 + s
        cfg = GeneratorConfig(
            stations=2,
            steps_per_station=(2, 2),
            vars_per_step=(vars_per_step, vars_per_step),
            edge_density=0.35,
            mechanisms=("sigmoid", "sine"),
            n_rows=n_rows,
            seed=sample_seed,
        )
        kg, truth = generate_plant(cfg)
        ds, _ = preprocess(sample_data(truth, n_rows, sample_seed + 1))
        rng = np.random.default_rng(sample_seed + 2)
        partial = _partial_truth(truth, known_pair_fraction, rng)

        cs = constraints_from_facts(kg, "L1", kg_facts(kg, "L1"))
        graph_before, rep_before = learn_with_constraints(ds, cs, params)
        before = ashd(graph_before, partial)

        pair = _pick_noimpact(graph_before, truth, cs, rng)
        cs_after = cs
        if pair is not None:
            cs_after = constraints_from_facts(
                kg, "L1", kg_facts(kg, "L1") + [("noimpact", pair[0], pair[1])]
            )
        graph_after, rep_after = learn_with_constraints(ds, cs_after, params)
        after = ashd(graph_after, partial)

        rows.append(ExperimentRow("before", sample_seed, rep_before.learn_ms,
                                  len(graph_before.edges), float(before)))
        rows.append(ExperimentRow("after", sample_seed, rep_after.learn_ms,
                                  len(graph_after.edges), float(after)))
    return rows


def _partial_truth(
    truth: GroundTruth, fraction: float, rng: np.random.Generator
) -> PartialGraph:
    """Ground truth restricted to a random share of unordered pairs."""
    variables = truth.graph.variables
    pairs = [
        (a, b) for i, a in enumerate(variables) for b in variables[i + 1 :]
    ]
    take = max(1, int(round(fraction * len(pairs))))
    picks = rng.choice(len(pairs), size=take, replace=False)
    es = truth.graph.edge_set()
    known = {}
    for i in picks:
        a, b = pairs[int(i)]
        known[(a, b)] = (a, b) in es
        known[(b, a)] = (b, a) in es
    return PartialGraph(list(variables), known)


def _pick_noimpact(learned, truth: GroundTruth, cs: ConstraintSet, rng):
    """A correct hasNoImpact assertion: prefer a spurious learned edge."""
    es = truth.graph.edge_set()
    spurious = sorted(p for p in learned.edge_set() if p not in es)
    if spurious:
        return spurious[int(rng.integers(len(spurious)))]
    free = sorted(p for p in cs.candidate_pairs() if p not in es)
    if free:
        return free[int(rng.integers(len(free)))]
    return None


def mean_std(rows: list[ExperimentRow], condition: str, attr: str = "ashd"):
    vals = [getattr(r, attr) for r in rows if r.condition == condition]
    return float(np.mean(vals)), float(np.std(vals))
