"""Causal structure discovery with latent confounders via greedy search
over partial orders of the variables."""

from .graphs import (
    MixedGraph,
    Path,
    discriminating_paths,
    graph_from_json,
    graph_to_json,
    has_discriminating_path,
    load_graph,
    save_graph,
)
from .separation import (
    brute_force_m_connected,
    independence_model,
    m_connected,
    m_separated,
    separable_by_ancestors,
)
from .posets import (
    Poset,
    ancestor_poset,
    enumerate_posets,
    load_poset,
    poset_from_json,
    poset_to_json,
    save_poset,
)
from .equivalence import (
    MarkChange,
    TO_BIDIRECTED,
    TO_DIRECTED,
    apply_mark_change,
    enumerate_dmags,
    enumerate_mec,
    is_maximal,
    legitimate_mark_changes,
    markov_equivalent,
    maximal_closure,
)
from .ci import (
    CachingOracle,
    CIOracle,
    DegenerateInputError,
    GaussianCITester,
    GraphOracle,
    PartialCorrelationOracle,
    ReplayOracle,
    dump_relations,
    load_relations,
    normal_quantile,
    partial_correlation,
)
from .imap import (
    FaithfulnessReport,
    FaithfulnessViolation,
    MinimalImapCache,
    check_restricted_faithfulness,
    imap_witness,
    is_imap,
    is_minimal_imap,
    poset_to_ancestral_graph,
    poset_to_minimal_imap,
)
from .search import (
    RestartOutcome,
    SearchAborted,
    SearchConfig,
    SearchTrace,
    gspo,
    gspo_hasse,
    min_degree_poset,
    run_restarts,
)
from .simulate import (
    BenchmarkRow,
    SimulationSpec,
    SkeletonMetrics,
    WeightedDAG,
    aggregate_rows,
    latent_projection,
    population_covariance,
    run_benchmark,
    sample_data,
    sample_projected_dmag,
    sample_weighted_dag,
    skeleton_metrics,
)
from .rng import substream

__version__ = "0.1.0"

__all__ = [
    "MixedGraph",
    "Path",
    "discriminating_paths",
    "graph_from_json",
    "graph_to_json",
    "has_discriminating_path",
    "load_graph",
    "save_graph",
    "brute_force_m_connected",
    "independence_model",
    "m_connected",
    "m_separated",
    "separable_by_ancestors",
    "Poset",
    "ancestor_poset",
    "enumerate_posets",
    "load_poset",
    "poset_from_json",
    "poset_to_json",
    "save_poset",
    "MarkChange",
    "TO_BIDIRECTED",
    "TO_DIRECTED",
    "apply_mark_change",
    "enumerate_dmags",
    "enumerate_mec",
    "is_maximal",
    "legitimate_mark_changes",
    "markov_equivalent",
    "maximal_closure",
    "CachingOracle",
    "CIOracle",
    "DegenerateInputError",
    "GaussianCITester",
    "GraphOracle",
    "PartialCorrelationOracle",
    "ReplayOracle",
    "dump_relations",
    "load_relations",
    "normal_quantile",
    "partial_correlation",
    "FaithfulnessReport",
    "FaithfulnessViolation",
    "MinimalImapCache",
    "check_restricted_faithfulness",
    "imap_witness",
    "is_imap",
    "is_minimal_imap",
    "poset_to_ancestral_graph",
    "poset_to_minimal_imap",
    "RestartOutcome",
    "SearchAborted",
    "SearchConfig",
    "SearchTrace",
    "gspo",
    "gspo_hasse",
    "min_degree_poset",
    "run_restarts",
    "BenchmarkRow",
    "SimulationSpec",
    "SkeletonMetrics",
    "WeightedDAG",
    "aggregate_rows",
    "latent_projection",
    "population_covariance",
    "run_benchmark",
    "sample_data",
    "sample_projected_dmag",
    "sample_weighted_dag",
    "skeleton_metrics",
    "substream",
    "__version__",
]
