"""
The training objective and its exact gradient.

`forward_loss` and `backward` share one code path: the origin graph and every
noise view go through the same encoder and heads, the node and hyperedge
losses are evaluated on the projections, and (for `backward`) the loss
gradients are pulled back through the heads and the encoder pass that
produced them. Contributions are accumulated in a fixed order (origin, then
views by index) so repeated runs are bitwise identical.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
from attrs import define

from hyfi.augmentation.views import NoiseView
from hyfi.logging.exceptions import NonFiniteException
from hyfi.loss.contrastive import contrastive_loss, total_loss
from hyfi.loss.weights import WeakWeights, weak_weights
from hyfi.nn.encoder import EncoderTrace, encode, encoder_backward
from hyfi.nn.projection import HeadTrace, head_backward, head_forward
from hyfi.objects.features import FeatureMatrix
from hyfi.objects.hypergraph import Hypergraph, OverlapLevel
from hyfi.objects.parameters import GradientSet, ModelParameters, ViewEmbeddings
from hyfi.training.config import TrainConfig

__all__ = ["LossRecord", "ObjectiveContext", "backward", "forward_loss"]


@define(frozen=True)
class LossRecord:
    node: float
    edge: float
    total: float


@define(frozen=True, eq=False)
class ObjectiveContext:
    """Per-dataset constants of the objective: weak weights and the graph the
    encoder runs on."""

    hypergraph: Hypergraph
    encoded: Hypergraph
    node_weights: WeakWeights
    edge_weights: WeakWeights
    self_loops: bool

    @classmethod
    def build(cls, h: Hypergraph, self_loops: bool) -> "ObjectiveContext":
        return cls(
            hypergraph=h,
            encoded=h.with_self_loops() if self_loops else h,
            node_weights=weak_weights(h.overlap(OverlapLevel.NODE)),
            edge_weights=weak_weights(h.overlap(OverlapLevel.EDGE)),
            self_loops=self_loops,
        )

    def encoding_graph(self, view: Optional[NoiseView]) -> Hypergraph:
        if view is None or view.hypergraph_override is None:
            return self.encoded
        override = view.hypergraph_override
        return override.with_self_loops() if self.self_loops else override


@define
class _Pass:
    trace: EncoderTrace
    node_head: HeadTrace
    edge_head: HeadTrace
    node_mask: Optional[np.ndarray]
    edge_mask: Optional[np.ndarray]

    @property
    def embeddings(self) -> ViewEmbeddings:
        edges = self.edge_head.output.shape[0]
        return ViewEmbeddings(
            node_embed=self.trace.node_embed,
            edge_embed=self.trace.edge_embed[:edges],
            node_proj=self.node_head.output,
            edge_proj=self.edge_head.output,
        )


def _run_pass(
    ctx: ObjectiveContext,
    graph: Hypergraph,
    features: FeatureMatrix,
    params: ModelParameters,
    view: Optional[NoiseView] = None,
) -> _Pass:
    trace = encode(graph, features, params.encoder)
    edges = ctx.hypergraph.num_hyperedges
    heads = params.projection
    node_head = head_forward(heads.node_head, trace.node_embed, "node head")
    edge_head = head_forward(heads.edge_head, trace.edge_embed[:edges], "edge head")
    node_mask = edge_mask = None
    if view is not None and view.hypergraph_override is not None:
        # elements the drop view stripped of every membership get no positive;
        # a node keeps its own singleton hyperedge when self loops are on
        override = view.hypergraph_override
        if not ctx.self_loops:
            node_mask = override.node_degree > 0
        edge_mask = override.hyperedge_degree > 0
    return _Pass(trace, node_head, edge_head, node_mask, edge_mask)


def _evaluate(
    ctx: ObjectiveContext,
    x: FeatureMatrix,
    views: Sequence[NoiseView],
    params: ModelParameters,
    cfg: TrainConfig,
    with_grad: bool,
    epoch: Optional[int] = None,
) -> Tuple[LossRecord, Optional[GradientSet]]:
    params.check()
    loss_cfg = cfg.loss
    origin = _run_pass(ctx, ctx.encoded, x, params)
    passes: List[_Pass] = []
    if loss_cfg.use_positive:
        for view in views:
            graph = ctx.encoding_graph(view)
            passes.append(_run_pass(ctx, graph, view.view_features(x), params, view))

    anchor = origin.embeddings
    view_embeds = [p.embeddings for p in passes]
    node = contrastive_loss(
        anchor.node_proj,
        [v.node_proj for v in view_embeds],
        ctx.node_weights,
        loss_cfg.tau_node,
        loss_cfg,
        positive_masks=[p.node_mask for p in passes],
        chunk_size=cfg.loss_chunk_size,
        with_grad=with_grad,
        what="node projection",
    )
    edge = None
    if loss_cfg.use_edge_loss:
        edge = contrastive_loss(
            anchor.edge_proj,
            [v.edge_proj for v in view_embeds],
            ctx.edge_weights,
            loss_cfg.tau_edge,
            loss_cfg,
            positive_masks=[p.edge_mask for p in passes],
            chunk_size=cfg.loss_chunk_size,
            with_grad=with_grad,
            what="hyperedge projection",
        )
    edge_total = edge.total if edge is not None else 0.0
    record = LossRecord(node.total, edge_total, total_loss(node.total, edge_total, loss_cfg))
    if not np.isfinite(record.total):
        raise NonFiniteException("loss", epoch)
    if not with_grad:
        return record, None

    grads = GradientSet.zeros_like(params)
    alpha = loss_cfg.effective_alpha
    all_passes = [origin] + passes
    d_nodes = [node.d_anchors] + list(node.d_views)
    d_edges: List[Optional[np.ndarray]] = [None] * len(all_passes)
    if edge is not None and alpha > 0.0:
        d_edges = [alpha * edge.d_anchors] + [alpha * d for d in edge.d_views]

    heads = params.projection
    for run, d_node, d_edge in zip(all_passes, d_nodes, d_edges):
        d_p = head_backward(heads.node_head, run.node_head, d_node, grads, "node_head")
        d_q = None
        if d_edge is not None:
            d_real = head_backward(
                heads.edge_head, run.edge_head, d_edge, grads, "edge_head"
            )
            d_q = np.zeros_like(run.trace.edge_embed)
            d_q[: d_real.shape[0]] = d_real
        encoder_backward(run.trace, params.encoder, d_p, d_q, grads)

    grads.check_finite(epoch)
    return record, grads


def forward_loss(
    h: Hypergraph,
    x: FeatureMatrix,
    views: Sequence[NoiseView],
    params: ModelParameters,
    cfg: TrainConfig,
    ctx: Optional[ObjectiveContext] = None,
) -> LossRecord:
    ctx = ctx or ObjectiveContext.build(h, cfg.encoder.self_loops)
    record, _ = _evaluate(ctx, x, views, params, cfg, with_grad=False)
    return record


def backward(
    h: Hypergraph,
    x: FeatureMatrix,
    views: Sequence[NoiseView],
    params: ModelParameters,
    cfg: TrainConfig,
    ctx: Optional[ObjectiveContext] = None,
    epoch: Optional[int] = None,
) -> Tuple[LossRecord, GradientSet]:
    """Loss of the full objective and its exact gradient for every parameter.

    The encoder and heads are shared by the origin pass and every view pass,
    so their gradients sum the contributions of all passes.
    """
    ctx = ctx or ObjectiveContext.build(h, cfg.encoder.self_loops)
    record, grads = _evaluate(ctx, x, views, params, cfg, with_grad=True, epoch=epoch)
    return record, grads
