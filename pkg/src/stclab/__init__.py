"""Spanning tree congestion laboratory.

Weighted graphs with single and double edge weights, exact spanning tree
congestion, (2P1N)-SAT tooling, and the reduction from (2P1N)-SAT to K-STC
with certificates in both directions.
"""

from .errors import (
    InvalidArgument,
    InvalidGraph,
    InvalidTree,
    ParseError,
    PreconditionViolated,
    Refused,
    StcLabError,
    Unsupported,
)
from .graph import (
    CongestionReport,
    Edge,
    EdgeWeight,
    GraphBuilder,
    SpanningTree,
    Vertex,
    WeightedGraph,
    congestion_of_edge,
    cross_edge_set,
    expand_double_weights,
    graph_from_edges,
    subdivide_edge,
    to_simple_graph,
    tree_congestion,
)
from .reduction import (
    ClaimReport,
    KParams,
    ReductionMap,
    RoundtripVerdict,
    assignment_to_tree,
    audit_reduction,
    reduce,
    roundtrip_check,
    tree_to_assignment,
    verify_claims,
)
from .sat import TwoPOneNFormula, evaluate, parse_dimacs, solve_sat, validate_2p1n, write_dimacs
from .solver import (
    SolveConfig,
    SolveResult,
    enumerate_spanning_trees,
    enumerate_trees_at_most,
    is_stc_at_most,
    stc_exact,
    stc_naive,
)

__version__ = "0.1.0"

__all__ = [
    "ClaimReport",
    "CongestionReport",
    "Edge",
    "EdgeWeight",
    "GraphBuilder",
    "InvalidArgument",
    "InvalidGraph",
    "InvalidTree",
    "KParams",
    "ParseError",
    "PreconditionViolated",
    "ReductionMap",
    "Refused",
    "RoundtripVerdict",
    "SolveConfig",
    "SolveResult",
    "SpanningTree",
    "StcLabError",
    "TwoPOneNFormula",
    "Unsupported",
    "Vertex",
    "WeightedGraph",
    "assignment_to_tree",
    "audit_reduction",
    "congestion_of_edge",
    "cross_edge_set",
    "enumerate_spanning_trees",
    "enumerate_trees_at_most",
    "evaluate",
    "expand_double_weights",
    "graph_from_edges",
    "is_stc_at_most",
    "parse_dimacs",
    "reduce",
    "roundtrip_check",
    "solve_sat",
    "stc_exact",
    "stc_naive",
    "subdivide_edge",
    "to_simple_graph",
    "tree_congestion",
    "tree_to_assignment",
    "validate_2p1n",
    "verify_claims",
    "write_dimacs",
]
