"""Immutable data model: hypergraphs, features, labels, parameters."""
from hyfi.objects.features import FeatureMatrix, LabelVector
from hyfi.objects.hypergraph import (
    Hypergraph,
    OverlapLevel,
    OverlapMatrix,
    overlap_matrix,
    shared_neighbors,
)

__all__ = [
    "FeatureMatrix",
    "Hypergraph",
    "LabelVector",
    "OverlapLevel",
    "OverlapMatrix",
    "overlap_matrix",
    "shared_neighbors",
]
