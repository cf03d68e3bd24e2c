import pytest

from rcatool.errors import MalformedDocument, UnknownVariable
from rcatool.graphs import (
    CausalEdge,
    CausalGraph,
    PartialGraph,
    ashd,
    graph_from_json,
    graph_to_json,
    root_cause_paths,
)


def diamond():
    # a -> b -> d, a -> c -> d, with distinct strengths
    return CausalGraph(
        ["a", "b", "c", "d"],
        [
            CausalEdge("a", "b", 0.9),
            CausalEdge("a", "c", 0.5),
            CausalEdge("b", "d", 0.8),
            CausalEdge("c", "d", 0.7),
        ],
    )


# ------------------------------------------------------------- basic graph


def test_edge_set_and_parents():
    g = diamond()
    assert g.edge_set() == {("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")}
    assert {e.src for e in g.parents("d")} == {"b", "c"}
    assert g.strength("a", "b") == 0.9
    with pytest.raises(KeyError):
        g.strength("b", "a")


def test_acyclicity_check():
    assert diamond().is_acyclic()
    cyclic = CausalGraph(["a", "b"], [CausalEdge("a", "b"), CausalEdge("b", "a")])
    assert not cyclic.is_acyclic()
    assert CausalGraph([], []).is_acyclic()


def test_json_roundtrip():
    g = diamond()
    back = graph_from_json(graph_to_json(g))
    assert back.variables == g.variables
    assert back.edge_set() == g.edge_set()
    assert back.strength("c", "d") == 0.7


def test_json_rejects_malformed():
    with pytest.raises(MalformedDocument):
        graph_from_json("{nope")
    with pytest.raises(MalformedDocument):
        graph_from_json('{"variables": ["a"]}')
    with pytest.raises(MalformedDocument):
        graph_from_json('{"variables": ["a"], "edges": [{"src": "a"}]}')


# -------------------------------------------------------------- fault paths


def test_diamond_has_four_paths_to_fault():
    res = root_cause_paths(diamond(), "d")
    assert sorted(res.paths) == [
        ["a", "b", "d"],
        ["a", "c", "d"],
        ["b", "d"],
        ["c", "d"],
    ]
    assert not res.truncated


def test_paths_sorted_by_strength_desc():
    res = root_cause_paths(diamond(), "d")
    assert res.strengths == sorted(res.strengths, reverse=True)
    # strongest is b -> d at 0.8; a -> b -> d compounds to 0.72
    assert res.paths[0] == ["b", "d"]
    assert res.strengths[0] == pytest.approx(0.8)
    by_path = dict(zip(map(tuple, res.paths), res.strengths))
    assert by_path[("a", "b", "d")] == pytest.approx(0.72)
    assert by_path[("a", "c", "d")] == pytest.approx(0.35)


def test_contributing_variables_carry_max_strength():
    res = root_cause_paths(diamond(), "d")
    assert set(res.contributing) == {"a", "b", "c"}
    assert res.contributing["a"] == pytest.approx(0.72)
    assert res.contributing["b"] == pytest.approx(0.8)


def test_paths_for_root_variable_is_empty():
    res = root_cause_paths(diamond(), "a")
    assert res.paths == []
    assert res.contributing == {}


def test_paths_unknown_fault():
    with pytest.raises(UnknownVariable):
        root_cause_paths(diamond(), "zz")


def test_paths_cap_truncates():
    # complete DAG on 6 nodes has many simple paths into the sink
    n = 6
    names = [f"v{i}" for i in range(n)]
    edges = [
        CausalEdge(names[i], names[j], 0.5)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    g = CausalGraph(names, edges)
    res = root_cause_paths(g, names[-1], cap=5)
    assert res.truncated
    assert len(res.paths) == 5


# ------------------------------------------------------------------- ashd


def test_ashd_identity_is_zero():
    g = diamond()
    assert ashd(g, PartialGraph.complete(g)) == 0


def test_ashd_reversal_counts_once():
    truth = PartialGraph(["a", "b"], {("a", "b"): True})
    learned = CausalGraph(["a", "b"], [CausalEdge("b", "a")])
    assert ashd(learned, truth) == 1


def test_ashd_missing_and_extra():
    truth = PartialGraph.complete(diamond())
    missing = CausalGraph(["a", "b", "c", "d"], [])
    assert ashd(missing, truth) == 4
    extra = CausalGraph(
        ["a", "b", "c", "d"], diamond().edges + [CausalEdge("a", "d", 0.1)]
    )
    assert ashd(extra, truth) == 1


def test_ashd_ignores_unknown_pairs():
    truth = PartialGraph(["a", "b", "c"], {("a", "b"): True})
    learned = CausalGraph(
        ["a", "b", "c"], [CausalEdge("a", "b"), CausalEdge("b", "c")]
    )
    # the b-c pair is outside the known set, so the extra edge is free
    assert ashd(learned, truth) == 0


def test_ashd_known_absence_penalizes_extra():
    truth = PartialGraph(["a", "b"], {("a", "b"): False})
    learned = CausalGraph(["a", "b"], [CausalEdge("a", "b")])
    assert ashd(learned, truth) == 1
    # absence known only one way: the reverse edge is not penalized
    reverse = CausalGraph(["a", "b"], [CausalEdge("b", "a")])
    assert ashd(reverse, truth) == 0


def test_ashd_unknown_variable():
    truth = PartialGraph(["a", "z"], {("a", "z"): True})
    with pytest.raises(UnknownVariable):
        ashd(diamond(), truth)
