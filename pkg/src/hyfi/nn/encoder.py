"""
The HGNN encoder f_theta.

Each layer k runs two message-passing phases over the incidence structure:

    Q(k) = act(D_E^-1 H^T D_V^-1/2 P(k-1) Theta_E(k) + b_E(k))
    P(k) = act(D_V^-1/2 H Q(k) Theta_V(k) + b_V(k))

with P(0) = X. Products against H run through the cached sparse operators of
the hypergraph. `encode` keeps the intermediates that `encoder_backward` needs
to pull gradients back through the same computation.
"""
from typing import List, Optional, Tuple

import numpy as np
from attrs import define

from hyfi.logging.exceptions import DimensionMismatchException, NonFiniteException
from hyfi.objects.features import FeatureMatrix
from hyfi.objects.hypergraph import Hypergraph
from hyfi.objects.parameters import EncoderParameters, GradientSet

__all__ = ["EncoderTrace", "encode", "encoder_forward", "encoder_backward"]


@define
class _LayerTrace:
    inputs: np.ndarray  # P(k-1)
    gathered: np.ndarray  # D_E^-1 H^T D_V^-1/2 P(k-1)
    edge_pre: np.ndarray
    edge_out: np.ndarray  # Q(k)
    scattered: np.ndarray  # D_V^-1/2 H Q(k)
    node_pre: np.ndarray


@define
class EncoderTrace:
    hypergraph: Hypergraph
    layers: List[_LayerTrace]
    node_embed: np.ndarray

    @property
    def edge_embed(self) -> np.ndarray:
        return self.layers[-1].edge_out


def _features(x) -> np.ndarray:
    return x.values if isinstance(x, FeatureMatrix) else np.asarray(x, dtype=np.float64)


def encode(h: Hypergraph, x, theta: EncoderParameters) -> EncoderTrace:
    """Run the encoder and keep every intermediate for the backward pass."""
    values = _features(x)
    if values.shape[0] != h.num_nodes:
        raise DimensionMismatchException(
            f"features have {values.shape[0]} rows but the hypergraph has"
            f" {h.num_nodes} nodes"
        )
    if values.shape[1] != theta.in_dim:
        raise DimensionMismatchException(
            f"features have {values.shape[1]} columns but the encoder expects"
            f" {theta.in_dim}"
        )
    theta.check()
    act = theta.activation
    node_to_edge, edge_to_node = h.node_to_edge, h.edge_to_node

    traces = []
    p = values
    for layer in theta.layers:
        gathered = np.asarray(node_to_edge @ p)
        edge_pre = gathered @ layer.edge_weight + layer.edge_bias
        q = act.forward(edge_pre, layer.slope)
        scattered = np.asarray(edge_to_node @ q)
        node_pre = scattered @ layer.node_weight + layer.node_bias
        traces.append(_LayerTrace(p, gathered, edge_pre, q, scattered, node_pre))
        p = act.forward(node_pre, layer.slope)

    if not np.all(np.isfinite(p)):
        raise NonFiniteException("encoder.node_embed")
    if not np.all(np.isfinite(traces[-1].edge_out)):
        raise NonFiniteException("encoder.edge_embed")
    return EncoderTrace(h, traces, p)


def encoder_forward(
    h: Hypergraph, x, theta: EncoderParameters
) -> Tuple[np.ndarray, np.ndarray]:
    """Node embeddings P (|V| x d') and hyperedge embeddings Q (|E| x d'')."""
    trace = encode(h, x, theta)
    return trace.node_embed, trace.edge_embed


def encoder_backward(
    trace: EncoderTrace,
    theta: EncoderParameters,
    d_node: Optional[np.ndarray],
    d_edge: Optional[np.ndarray],
    grads: GradientSet,
) -> None:
    """Accumulate d(loss)/d(theta) into `grads`, given the loss gradients with
    respect to the final node and hyperedge embeddings."""
    act = theta.activation
    h = trace.hypergraph
    count = len(theta.layers)
    d_p = d_node if d_node is not None else np.zeros_like(trace.node_embed)

    for k in reversed(range(count)):
        layer, cache = theta.layers[k], trace.layers[k]
        prefix = f"encoder.{k}"

        d_node_pre, d_slope_node = act.backward(d_p, cache.node_pre, layer.slope)
        grads.add(f"{prefix}.node_weight", cache.scattered.T @ d_node_pre)
        grads.add(f"{prefix}.node_bias", d_node_pre.sum(axis=0))
        d_q = np.asarray(h.edge_to_node.T @ (d_node_pre @ layer.node_weight.T))
        if k == count - 1 and d_edge is not None:
            d_q = d_q + d_edge

        d_edge_pre, d_slope_edge = act.backward(d_q, cache.edge_pre, layer.slope)
        grads.add(f"{prefix}.edge_weight", cache.gathered.T @ d_edge_pre)
        grads.add(f"{prefix}.edge_bias", d_edge_pre.sum(axis=0))
        if d_slope_node is not None:
            grads.add(f"{prefix}.slope", d_slope_node + d_slope_edge)

        if k:
            d_p = np.asarray(h.node_to_edge.T @ (d_edge_pre @ layer.edge_weight.T))
