"""Interactive root-cause analysis for sensor-instrumented manufacturing
lines: a typed plant knowledge graph, a constrained causal additive model
learner, synthetic data generation, and an HTTP service with expert
feedback."""

from .dataset import Dataset, from_csv, load_dataset, save_dataset, to_csv
from .demo import DEMO_LINE, DEMO_PRODUCT, DEMO_VARIABLES, demo_plant
from .graphs import (
    CausalEdge,
    CausalGraph,
    PartialGraph,
    RootCausePaths,
    ashd,
    graph_from_json,
    graph_to_json,
    root_cause_paths,
)
from .kg import (
    BlacklistEdge,
    ConstraintSet,
    Edge,
    EdgeKind,
    KnowledgeGraph,
    Node,
    NodeKind,
    SchemaViolation,
    SetRole,
    VariableRole,
    apply_feedback,
    candidate_edges,
    derive_partial_order,
    load,
    save,
    validate,
)
from .learner import (
    LearnParams,
    LearnReport,
    count_linear_extensions,
    iter_linear_extensions,
    learn,
    learn_with_constraints,
    prune_edges,
    score_order,
    search_order,
)
from .preprocess import PreprocessReport, preprocess
from .splines import AdditiveModel, fit_additive
from .synth import (
    GeneratorConfig,
    GroundTruth,
    Mechanism,
    generate_plant,
    sample_data,
    truth_from_json,
    truth_to_json,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
