import numpy as np
import pytest

import rcatool as r
from rcatool.graphs import CausalEdge, CausalGraph
from rcatool.synth import GroundTruth, Mechanism


@pytest.fixture
def demo_kg():
    return r.demo_plant()


@pytest.fixture
def demo_kg_no_roles():
    return r.demo_plant(with_roles=False)


def demo_truth(noise=0.5):
    """A ground truth whose edges all lie inside the demo candidate set."""
    variables = ["SortingTime", "Weight", "AmountAdhesive", "Humidity", "Pressure", "HeatInput"]
    edges = [
        CausalEdge("Humidity", "AmountAdhesive"),
        CausalEdge("Weight", "Pressure"),
        CausalEdge("AmountAdhesive", "HeatInput"),
    ]
    mechanisms = {
        ("Humidity", "AmountAdhesive"): Mechanism("sigmoid", 2.5, 2.0),
        ("Weight", "Pressure"): Mechanism("sine", 2.5, 1.5),
        ("AmountAdhesive", "HeatInput"): Mechanism("sigmoid", -2.5, 2.0),
    }
    return GroundTruth(
        CausalGraph(variables, edges), mechanisms, {v: noise for v in variables}
    )


@pytest.fixture
def demo_gt():
    return demo_truth()


def chain_truth(noise=0.5):
    """4-variable chain a -> b -> c -> d with strong non-linear mechanisms."""
    variables = ["a", "b", "c", "d"]
    edges = [CausalEdge("a", "b"), CausalEdge("b", "c"), CausalEdge("c", "d")]
    mechanisms = {
        ("a", "b"): Mechanism("sigmoid", 2.5, 2.0),
        ("b", "c"): Mechanism("sine", 2.5, 1.5),
        ("c", "d"): Mechanism("sigmoid", -2.5, 2.0),
    }
    return GroundTruth(
        CausalGraph(variables, edges), mechanisms, {v: noise for v in variables}
    )


def free_constraints(variables, step="PS1"):
    """Single-step constraint set: everything unordered, all pairs allowed."""
    p = len(variables)
    return r.ConstraintSet(
        list(variables),
        np.zeros((p, p), dtype=bool),
        ~np.eye(p, dtype=bool),
        {v: step for v in variables},
    )
