"""Desk-scale machinery for size-Ramsey numbers of long bipartite subdivisions."""

from .bigraph import BipartiteGraph, PartId, Verdict, VertexRef, VertexSet
from .errors import SubRamseyError

__all__ = ["BipartiteGraph", "PartId", "Verdict", "VertexRef", "VertexSet", "SubRamseyError"]
__version__ = "0.1.0"
