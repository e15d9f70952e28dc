"""Additive spanners for weighted graphs, with verification oracles."""

from wspan.constructions import (
    ConstructionFailure,
    ConstructionParams,
    SpannerResult,
    all_pairs_spanner,
    constrained_shortest_path,
    default_params,
    pairwise_spanner,
    pairwise_spanner_2w,
    pairwise_spanner_4w,
    pairwise_spanner_8w,
    subset_spanner_4w,
)
from wspan.graph import (
    DemandPairSet,
    DisconnectedGraphError,
    GraphError,
    PathRecord,
    Subgraph,
    WeightedGraph,
    dijkstra_sssp,
    shortest_path,
    shortest_path_tree,
)
from wspan.kernels import BACKEND
from wspan.light import d_light_initialization, missing_edges
from wspan.verify import StretchReport, verify_stretch

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConstructionFailure",
    "ConstructionParams",
    "DemandPairSet",
    "DisconnectedGraphError",
    "GraphError",
    "PathRecord",
    "SpannerResult",
    "StretchReport",
    "Subgraph",
    "WeightedGraph",
    "all_pairs_spanner",
    "constrained_shortest_path",
    "d_light_initialization",
    "default_params",
    "dijkstra_sssp",
    "missing_edges",
    "pairwise_spanner",
    "pairwise_spanner_2w",
    "pairwise_spanner_4w",
    "pairwise_spanner_8w",
    "shortest_path",
    "shortest_path_tree",
    "subset_spanner_4w",
    "verify_stretch",
]
