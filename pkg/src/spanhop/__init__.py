"""Spanners and hopsets with exact desk-scale certification.

Constructions emit their guarantee as a certificate; the verify module turns
certificates into exhaustive per-pair checks against the exact distance
oracle, plus radius audits, size ledgers and expectation audits.  Execution
models (LOCAL, CONGEST, multi-pass streaming) are cost simulators over the
same phase engine and emit identical edge sets.
"""

from .graphs import (
    Graph,
    ParameterError,
    ball,
    ball_boundary,
    beta_limited_apsp,
    beta_limited_sssp,
    exact_apsp,
    read_graph,
    write_graph,
)
from .rng import RngStream
from .structures import EdgeSubgraph, Hopset

__all__ = [
    "Graph",
    "ParameterError",
    "RngStream",
    "EdgeSubgraph",
    "Hopset",
    "exact_apsp",
    "beta_limited_sssp",
    "beta_limited_apsp",
    "ball",
    "ball_boundary",
    "read_graph",
    "write_graph",
]
