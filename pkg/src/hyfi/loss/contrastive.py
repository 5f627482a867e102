"""
Weak-positive, group-unit contrastive loss.

For an anchor i with origin projection z_i, noise-view projections z'_{m,i}
and the origin projections z_j of every other element:

    pos(i)  = sum_m exp(sim(z_i, z'_{m,i}) / tau)
    weak(i) = sum_{j in N(i)} w_ij exp(sim(z_i, z_j) / tau)
    neg(i)  = sum_{j not in N(i), j != i} exp(sim(z_i, z_j) / tau)
    L(i)    = log(1 + neg / (pos + weak))

where N(i) is the set of elements sharing at least one group with i. With
`use_weak_positive` off, N(i) is folded into the negatives.

Anchors are processed in row blocks of `chunk_size`; the block loop is a fixed
re-ordering of the same sums, so the result does not depend on the block size
beyond floating-point summation order inside a row.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
from attrs import define

from hyfi.logging.exceptions import (
    DimensionMismatchException,
    LossConfigurationException,
    ZeroNormEmbeddingException,
)
from hyfi.loss.config import LossConfig
from hyfi.loss.weights import WeakWeights

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "ContrastiveResult",
    "contrastive_loss",
    "node_contrastive_loss",
    "edge_contrastive_loss",
    "total_loss",
]

DEFAULT_CHUNK_SIZE = 2048


@define
class ContrastiveResult:
    total: float
    per_anchor: np.ndarray
    d_anchors: Optional[np.ndarray] = None
    d_views: Optional[List[np.ndarray]] = None


def _normalise(
    values: np.ndarray, what: str, rows_used: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.sqrt(np.einsum("ij,ij->i", values, values))
    dead = norms == 0.0
    if rows_used is not None:
        dead &= rows_used
    if np.any(dead):
        raise ZeroNormEmbeddingException(what, np.flatnonzero(dead).tolist())
    safe = np.where(norms == 0.0, 1.0, norms)
    return values / safe[:, None], safe


def _normalise_backward(
    unit: np.ndarray, norms: np.ndarray, d_unit: np.ndarray
) -> np.ndarray:
    radial = np.einsum("ij,ij->i", unit, d_unit)
    return (d_unit - unit * radial[:, None]) / norms[:, None]


def _check_shapes(
    anchors: np.ndarray,
    views: Sequence[np.ndarray],
    weights: WeakWeights,
    masks: Sequence[Optional[np.ndarray]],
) -> None:
    for m, view in enumerate(views):
        if view.shape != anchors.shape:
            raise DimensionMismatchException(
                f"view {m} has shape {view.shape}, origin has {anchors.shape}"
            )
    if weights.size != anchors.shape[0]:
        raise DimensionMismatchException(
            f"weak weights cover {weights.size} elements, embeddings have"
            f" {anchors.shape[0]} rows"
        )
    if len(masks) != len(views):
        raise DimensionMismatchException(
            f"{len(masks)} positive masks for {len(views)} views"
        )


def contrastive_loss(
    anchors: np.ndarray,
    views: Sequence[np.ndarray],
    weights: WeakWeights,
    tau: float,
    cfg: LossConfig,
    positive_masks: Optional[Sequence[Optional[np.ndarray]]] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    with_grad: bool = False,
    what: str = "embeddings",
) -> ContrastiveResult:
    """Total and per-anchor loss, plus gradients with respect to `anchors` and
    every view when `with_grad` is set.

    `positive_masks[m]` marks the anchors whose positive term for view m is
    kept; None keeps all of them. An anchor whose every positive is masked
    out and that has no weak-positive term contributes zero loss.
    """
    anchors = np.asarray(anchors, dtype=np.float64)
    views = [np.asarray(v, dtype=np.float64) for v in views]
    masks = list(positive_masks) if positive_masks is not None else [None] * len(views)
    _check_shapes(anchors, views, weights, masks)
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")

    n = anchors.shape[0]
    view_count = len(views)
    if not cfg.use_positive:
        views, masks = [], []
    if cfg.use_weak_positive and not cfg.use_weak_weight:
        weights = weights.unweighted()

    unit, norms = _normalise(anchors, f"{what} (origin)")
    view_units = []
    for m, (view, mask) in enumerate(zip(views, masks)):
        view_units.append(_normalise(view, f"{what} (view {m})", mask))

    per_anchor = np.zeros(n)
    d_unit = np.zeros_like(unit) if with_grad else None
    d_view_units = [np.zeros_like(u) for u, _ in view_units] if with_grad else None

    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        rows = np.arange(start, stop)
        block = unit[start:stop]
        logits = block @ unit.T / tau
        others = np.ones(logits.shape, dtype=bool)
        others[rows - start, rows] = False

        pos_logits = np.empty((len(view_units), stop - start))
        pos_keep = np.ones(pos_logits.shape, dtype=bool)
        for m, (view_unit, _) in enumerate(view_units):
            pos_logits[m] = np.einsum("ij,ij->i", block, view_unit[start:stop]) / tau
            if masks[m] is not None:
                pos_keep[m] = masks[m][start:stop]

        if cfg.use_weak_positive:
            weak_w = weights.matrix[start:stop].toarray()
            negative = others & (weak_w == 0.0)
        else:
            weak_w = None
            negative = others

        shift = np.max(np.where(others, logits, -np.inf), axis=1, initial=-np.inf)
        if pos_logits.size:
            shift = np.maximum(
                shift, np.max(np.where(pos_keep, pos_logits, -np.inf), axis=0)
            )
        shift = np.where(np.isfinite(shift), shift, 0.0)

        exp_sim = np.exp(np.where(others, logits - shift[:, None], -np.inf))
        exp_pos = np.exp(np.where(pos_keep, pos_logits - shift[None, :], -np.inf))
        pos = exp_pos.sum(axis=0)
        weak = (weak_w * exp_sim).sum(axis=1) if weak_w is not None else 0.0
        neg = np.where(negative, exp_sim, 0.0).sum(axis=1)
        numerator = pos + weak

        empty = numerator <= 0.0
        # anchors that lost every positive to a drop view and have no partner
        # sit out this evaluation
        skipped = empty & (pos_keep.shape[0] > 0) & ~pos_keep.any(axis=0)
        empty &= ~skipped
        if np.any(empty):
            bad = (rows[empty]).tolist()
            raise LossConfigurationException(
                f"{what}: anchor(s) {bad[:10]} have no positive and no weak-positive"
                " term (pos + weak = 0); enable use_positive or give every anchor a"
                " group partner"
            )
        numerator = np.where(skipped, 1.0, numerator)
        per_anchor[start:stop] = np.where(skipped, 0.0, np.log1p(neg / numerator))

        if not with_grad:
            continue
        inv_all = np.where(skipped, 0.0, 1.0 / (numerator + neg))
        inv_num = np.where(skipped, 0.0, 1.0 / numerator)
        pull = (inv_all - inv_num)[:, None]
        g = np.where(negative, exp_sim, 0.0) * inv_all[:, None]
        if weak_w is not None:
            g = g + weak_w * exp_sim * pull
        d_unit[start:stop] += g @ unit / tau
        d_unit += g.T @ block / tau
        g_pos = exp_pos * pull.T
        for m, (view_unit, _) in enumerate(view_units):
            d_unit[start:stop] += g_pos[m][:, None] * view_unit[start:stop] / tau
            d_view_units[m][start:stop] += g_pos[m][:, None] * block / tau

    total = float(per_anchor.sum())
    if not with_grad:
        return ContrastiveResult(total, per_anchor)

    d_anchors = _normalise_backward(unit, norms, d_unit)
    d_views = [
        _normalise_backward(view_unit, view_norms, d_view_unit)
        for (view_unit, view_norms), d_view_unit in zip(view_units, d_view_units)
    ]
    if not cfg.use_positive:
        d_views = [np.zeros_like(anchors) for _ in range(view_count)]
    return ContrastiveResult(total, per_anchor, d_anchors, d_views)


def node_contrastive_loss(
    z: np.ndarray,
    z_views: Sequence[np.ndarray],
    ww: WeakWeights,
    cfg: LossConfig,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[float, np.ndarray]:
    result = contrastive_loss(
        z, z_views, ww, cfg.tau_node, cfg, chunk_size=chunk_size, what="node projection"
    )
    return result.total, result.per_anchor


def edge_contrastive_loss(
    y: np.ndarray,
    y_views: Sequence[np.ndarray],
    ww_edge: WeakWeights,
    cfg: LossConfig,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[float, np.ndarray]:
    """Same objective with hyperedges as anchors and tau_edge; exactly zero
    when the edge loss is switched off."""
    if not cfg.use_edge_loss:
        return 0.0, np.zeros(np.asarray(y).shape[0])
    result = contrastive_loss(
        y,
        y_views,
        ww_edge,
        cfg.tau_edge,
        cfg,
        chunk_size=chunk_size,
        what="hyperedge projection",
    )
    return result.total, result.per_anchor


def total_loss(node_total: float, edge_total: float, cfg: LossConfig) -> float:
    return node_total + cfg.effective_alpha * edge_total
