"""Structure learning for the root cause graph.

Two-step procedure: search the causal ordering that minimizes the summed
log residual score, restricted to linear extensions of the plant's
partial order, then keep the edges whose removal costs a meaningful
fraction of explained variance. All fits reuse one cache keyed by
(target, parent set), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import islice

import numpy as np

from .dataset import Dataset
from .errors import InconsistentOrder, RcaError, SearchSpaceTooLarge
from .graphs import CausalEdge, CausalGraph
from .kg import ConstraintSet, KnowledgeGraph, candidate_edges
from .splines import _TermSmoother, backfit

LOG_FLOOR = 1e-12


@dataclass
class LearnParams:
    basis_size: int = 10
    ridge_lambda: float = 1.0
    prune_threshold: float = 0.02
    search_mode: str = "exhaustive"  # or "greedy"
    exhaustive_limit: int = 5040
    seed: int = 0

    def __post_init__(self):
        if self.basis_size < 3:
            raise RcaError("basis_size must be >= 3")
        if self.ridge_lambda < 0:
            raise RcaError("ridge_lambda must be >= 0")
        if not (0 < self.prune_threshold < 1):
            raise RcaError("prune_threshold must lie in (0, 1)")
        if self.search_mode not in ("exhaustive", "greedy"):
            raise RcaError(f"unknown search mode {self.search_mode!r}")


@dataclass
class LearnReport:
    candidate_edges: int = 0
    orders_evaluated: int = 0
    learn_ms: float = 0.0
    score: float = 0.0

    def to_dict(self):
        return {
            "candidate_edges": self.candidate_edges,
            "orders_evaluated": self.orders_evaluated,
            "learn_ms": self.learn_ms,
            "score": self.score,
        }


class _FitCache:
    """Memoized additive fits keyed by (target, sorted parent ids).

    Term smoothers (spline bases and factorized normal equations) depend
    only on the parent column, so they are built once and shared by every
    fit that uses that parent.
    """

    def __init__(self, ds: Dataset, params: LearnParams):
        self.ds = ds
        self.params = params
        self.cache: dict[tuple[str, tuple[str, ...]], float] = {}
        self._smoothers: dict[str, _TermSmoother] = {}

    def _smoother(self, parent: str) -> _TermSmoother:
        sm = self._smoothers.get(parent)
        if sm is None:
            sm = _TermSmoother(
                parent,
                self.ds.column(parent),
                self.params.basis_size,
                self.params.ridge_lambda,
            )
            self._smoothers[parent] = sm
        return sm

    def rss(self, target: str, parents: frozenset[str] | set[str]) -> float:
        key = (target, tuple(sorted(parents)))
        if key not in self.cache:
            model = backfit(
                self.ds.column(target),
                [self._smoother(p) for p in key[1]],
                target=target,
            )
            self.cache[key] = model.rss
        return self.cache[key]


def restrict_constraints(cs: ConstraintSet, keep: list[str]) -> ConstraintSet:
    """Project the constraint set onto a column subset, preserving order."""
    keep_set = set(keep)
    variables = [v for v in cs.variables if v in keep_set]
    idx = [cs.variables.index(v) for v in variables]
    return ConstraintSet(
        variables,
        cs.precedes[np.ix_(idx, idx)],
        cs.allowed[np.ix_(idx, idx)],
        {v: cs.step_group[v] for v in variables},
    )


def _check_order(order: list[str], cs: ConstraintSet) -> None:
    if sorted(order) != sorted(cs.variables):
        raise InconsistentOrder("order is not a permutation of the variables")
    pos = {v: i for i, v in enumerate(order)}
    for i, a in enumerate(cs.variables):
        for j, b in enumerate(cs.variables):
            if cs.precedes[i, j] and pos[a] > pos[b]:
                raise InconsistentOrder(f"{a} must precede {b}")


def _order_parents(order: list[str], cs: ConstraintSet) -> dict[str, frozenset[str]]:
    pos = {v: i for i, v in enumerate(order)}
    out = {}
    for k in cs.variables:
        kk = cs.index(k)
        out[k] = frozenset(
            j for j in cs.variables if pos[j] < pos[k] and cs.allowed[cs.index(j), kk]
        )
    return out


def score_order(
    order: list[str],
    ds: Dataset,
    cs: ConstraintSet,
    params: LearnParams | None = None,
    _cache: _FitCache | None = None,
) -> float:
    """Summed log-RSS of each variable on its allowed predecessors."""
    params = params or LearnParams()
    _check_order(list(order), cs)
    cache = _cache or _FitCache(ds, params)
    total = 0.0
    for k, parents in _order_parents(list(order), cs).items():
        total += math.log(max(cache.rss(k, parents), LOG_FLOOR))
    return total


def iter_linear_extensions(cs: ConstraintSet):
    """Yield linear extensions of the precedence relation, lexicographically."""
    variables = sorted(cs.variables)
    idx = {v: cs.variables.index(v) for v in variables}
    remaining = set(variables)
    prefix: list[str] = []

    def free(v: str) -> bool:
        return not any(
            cs.precedes[idx[u], idx[v]] for u in remaining if u != v
        )

    def rec():
        if not remaining:
            yield list(prefix)
            return
        for v in [v for v in variables if v in remaining and free(v)]:
            remaining.discard(v)
            prefix.append(v)
            yield from rec()
            prefix.pop()
            remaining.add(v)

    yield from rec()


def count_linear_extensions(cs: ConstraintSet, limit: int | None = None) -> int:
    """Extension count, stopping early once a limit is exceeded."""
    n = 0
    gen = iter_linear_extensions(cs)
    if limit is None:
        return sum(1 for _ in gen)
    for _ in islice(gen, limit + 1):
        n += 1
        if n > limit:
            break
    return n


def search_order(
    ds: Dataset,
    cs: ConstraintSet,
    params: LearnParams | None = None,
    _cache: _FitCache | None = None,
    _report: LearnReport | None = None,
) -> list[str]:
    params = params or LearnParams()
    cache = _cache or _FitCache(ds, params)
    report = _report if _report is not None else LearnReport()
    if params.search_mode == "exhaustive":
        count = count_linear_extensions(cs, params.exhaustive_limit)
        if count > params.exhaustive_limit:
            raise SearchSpaceTooLarge(
                f"more than {params.exhaustive_limit} linear extensions"
            )
        best_order, best_score = None, math.inf
        for order in iter_linear_extensions(cs):
            s = score_order(order, ds, cs, params, _cache=cache)
            report.orders_evaluated += 1
            # lexicographic tie-break is free: extensions arrive sorted
            if s < best_score - 1e-12:
                best_order, best_score = order, s
        report.score = best_score if best_order is not None else 0.0
        return best_order or []
    return _greedy_order(ds, cs, params, cache, report)


def _greedy_order(ds, cs, params, cache, report) -> list[str]:
    """Per-step insertion search: steps keep their topological order and
    each step's variables are inserted one by one at the best slot."""
    steps: list[str] = []
    by_step: dict[str, list[str]] = {}
    for v in cs.variables:  # variables arrive in flattened step order
        g = cs.step_group[v]
        if g not in steps:
            steps.append(g)
            by_step[g] = []
        by_step[g].append(v)

    idx = {v: i for i, v in enumerate(cs.variables)}

    def var_score(k: str, order: list[str], upto: int) -> float:
        """log RSS of k on its allowed predecessors among order[:upto]."""
        kk = idx[k]
        parents = frozenset(
            j for j in order[:upto] if cs.allowed[idx[j], kk]
        )
        return math.log(max(cache.rss(k, parents), LOG_FLOOR))

    order: list[str] = []
    for g in steps:
        members = sorted(
            by_step[g],
            key=lambda v: (-float(np.nanvar(ds.column(v))), v),
        )
        segment_start = len(order)
        for v in members:
            # positions differ only in the terms of this step's variables;
            # earlier steps' parent sets are unaffected by the insertion
            best_pos, best = None, math.inf
            for pos_i in range(segment_start, len(order) + 1):
                candidate = order[:pos_i] + [v] + order[pos_i:]
                s = sum(
                    var_score(k, candidate, candidate.index(k))
                    for k in candidate[segment_start:]
                )
                report.orders_evaluated += 1
                if s < best - 1e-12:
                    best_pos, best = pos_i, s
            order.insert(best_pos, v)
    report.score = (
        sum(var_score(k, order, i) for i, k in enumerate(order)) if order else 0.0
    )
    return order


def prune_edges(
    order: list[str],
    ds: Dataset,
    cs: ConstraintSet,
    params: LearnParams | None = None,
    _cache: _FitCache | None = None,
) -> CausalGraph:
    """Keep j -> k when dropping j costs more than the threshold fraction
    of k's total sum of squares; the drop, normalized, is the strength."""
    params = params or LearnParams()
    cache = _cache or _FitCache(ds, params)
    parents_by_target = _order_parents(list(order), cs)
    edges: list[CausalEdge] = []
    for k in cs.variables:
        parents = parents_by_target[k]
        if not parents:
            continue
        y = ds.column(k)
        tss = float(np.sum((y - y.mean()) ** 2))
        if tss <= 0:
            continue
        rss_full = cache.rss(k, parents)
        for j in sorted(parents):
            rss_without = cache.rss(k, parents - {j})
            gain = rss_without - rss_full
            if gain > params.prune_threshold * tss:
                strength = min(max(gain / tss, 0.0), 1.0)
                edges.append(CausalEdge(j, k, strength))
    return CausalGraph(list(cs.variables), edges)


def learn_with_constraints(
    ds: Dataset,
    cs: ConstraintSet,
    params: LearnParams | None = None,
) -> tuple[CausalGraph, LearnReport]:
    """Order search plus edge pruning under an explicit constraint set."""
    params = params or LearnParams()
    t0 = time.perf_counter()
    cs = restrict_constraints(cs, [c for c in ds.columns if c in set(cs.variables)])
    report = LearnReport(candidate_edges=int(cs.allowed.sum()))
    sub = ds.select_columns(cs.variables)
    cache = _FitCache(sub, params)
    order = search_order(sub, cs, params, _cache=cache, _report=report)
    graph = prune_edges(order, sub, cs, params, _cache=cache)
    report.learn_ms = (time.perf_counter() - t0) * 1000.0
    assert graph.is_acyclic()
    pairs = set(cs.candidate_pairs())
    assert all((e.src, e.dst) in pairs for e in graph.edges)
    return graph, report


def learn(
    ds: Dataset,
    kg: KnowledgeGraph,
    line_id: str,
    params: LearnParams | None = None,
) -> tuple[CausalGraph, LearnReport]:
    """End to end: candidate edges -> order search -> edge pruning."""
    return learn_with_constraints(ds, candidate_edges(kg, line_id), params)
