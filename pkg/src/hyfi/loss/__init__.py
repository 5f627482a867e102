"""Weak-positive group-unit contrastive objective at node and hyperedge level."""
from hyfi.loss.config import LossConfig
from hyfi.loss.contrastive import (
    ContrastiveResult,
    contrastive_loss,
    edge_contrastive_loss,
    node_contrastive_loss,
    total_loss,
)
from hyfi.loss.weights import WeakWeights, weak_weights

__all__ = [
    "ContrastiveResult",
    "LossConfig",
    "WeakWeights",
    "contrastive_loss",
    "edge_contrastive_loss",
    "node_contrastive_loss",
    "total_loss",
    "weak_weights",
]
