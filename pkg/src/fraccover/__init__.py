"""Fractional edge and vertex covers of hypergraphs with bounded support."""

from .covers import (
    EdgeWeightFunction,
    VertexWeightFunction,
    edge_cover_number,
    vertex_cover_number,
)
from .fhw import TreeDecomposition, fhw_bruteforce, fhw_leq_k
from .hypergraph import Hypergraph, dualize, is_cd, multi_intersection, parse, reduce
from .support_reduction import reduce_support, reduce_vertex_support

__all__ = [
    "EdgeWeightFunction",
    "Hypergraph",
    "TreeDecomposition",
    "VertexWeightFunction",
    "dualize",
    "edge_cover_number",
    "fhw_bruteforce",
    "fhw_leq_k",
    "is_cd",
    "multi_intersection",
    "parse",
    "reduce",
    "reduce_support",
    "reduce_vertex_support",
    "vertex_cover_number",
]
