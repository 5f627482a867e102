import warnings
from typing import List, Optional

import numpy as np
from attrs import define

from hyfi.augmentation.spec import AugmentationKind, AugmentationSpec
from hyfi.core.helpers.random import stream
from hyfi.logging.exceptions import AugmentationException, HyfiWarning
from hyfi.objects.features import FeatureMatrix
from hyfi.objects.hypergraph import Hypergraph

__all__ = [
    "NoiseView",
    "drop_augment",
    "generate_view",
    "generate_views",
    "perturb_features",
]


@define(frozen=True, eq=False)
class NoiseView:
    """One re-encodable view X' (or, for drop kinds, a perturbed topology).

    Feature-noise views carry perturbed features and no topology override;
    drop views see the origin features and a hypergraph with the same node
    and hyperedge counts but fewer memberships. A drop view built without
    features stores None; read features through `view_features(origin)`,
    which hands back the origin matrix itself in that case.
    """

    features: Optional[FeatureMatrix]
    hypergraph_override: Optional[Hypergraph]
    view_index: int

    def hypergraph(self, origin: Hypergraph) -> Hypergraph:
        if self.hypergraph_override is not None:
            return self.hypergraph_override
        return origin

    def view_features(self, origin: FeatureMatrix) -> FeatureMatrix:
        return self.features if self.features is not None else origin


def _view_stream(spec: AugmentationSpec, view_index: int, epoch: int) -> np.random.Generator:
    if view_index < 0:
        raise AugmentationException(f"view_index must be non-negative, got {view_index}")
    return stream(spec.seed, "augmentation", epoch, view_index)


def _rounded(values: np.ndarray) -> np.ndarray:
    # threshold at 0.5: entries near 0 count as 0, entries near 1 as 1
    return np.floor(values + 0.5)


def perturb_features(
    x: FeatureMatrix, spec: AugmentationSpec, view_index: int, epoch: int = 0
) -> NoiseView:
    """X' = X + (-1)^round(X) |eps| (gaussian, uniform) or a bit flip of
    round(X) (bernoulli), clamped to [0, 1].

    Deterministic in (spec.seed, epoch, view_index).
    """
    if not spec.kind.is_noise:
        raise AugmentationException(
            f"perturb_features needs a noise kind, got '{spec.kind.value}'"
        )
    if not x.in_unit_range:
        warnings.warn(
            f"features span [{x.min_value}, {x.max_value}], outside [0, 1]; the"
            " sign rule of the perturbation assumes unit-range features",
            HyfiWarning,
        )
    rng = _view_stream(spec, view_index, epoch)
    values = x.values

    if spec.kind is AugmentationKind.BERNOULLI:
        flip = rng.random(values.shape) < spec.flip_prob
        perturbed = np.where(flip, 1.0 - _rounded(values), values)
    else:
        if spec.kind is AugmentationKind.GAUSSIAN:
            magnitude = np.abs(rng.normal(0.0, spec.sigma, size=values.shape))
        else:
            magnitude = rng.uniform(0.0, spec.sigma, size=values.shape)
        sign = np.where(np.mod(_rounded(values), 2.0) == 0.0, 1.0, -1.0)
        perturbed = values + sign * magnitude

    return NoiseView(FeatureMatrix(np.clip(perturbed, 0.0, 1.0)), None, view_index)


def drop_augment(
    h: Hypergraph,
    spec: AugmentationSpec,
    view_index: int,
    epoch: int = 0,
    features: Optional[FeatureMatrix] = None,
) -> NoiseView:
    """Remove incidences, whole nodes or whole hyperedges with `spec.drop_rate`.

    Removed nodes and hyperedges keep their index (with no memberships) so the
    view lines up row by row with the origin. `h` itself is never modified.
    `features` are passed through unchanged; when omitted the view's
    `view_features(origin)` resolves to the origin features.
    """
    if not spec.kind.is_drop:
        raise AugmentationException(
            f"drop_augment needs a drop kind, got '{spec.kind.value}'"
        )
    rng = _view_stream(spec, view_index, epoch)
    edge_ids = np.repeat(np.arange(h.num_hyperedges), h.hyperedge_degree)
    node_ids = np.fromiter(
        (v for edge in h.hyperedges for v in edge), dtype=np.int64, count=edge_ids.size
    )

    if spec.kind is AugmentationKind.DROP_INCIDENCE:
        keep = rng.random(edge_ids.size) >= spec.drop_rate
    elif spec.kind is AugmentationKind.DROP_NODE:
        keep = (rng.random(h.num_nodes) >= spec.drop_rate)[node_ids]
    else:
        keep = (rng.random(h.num_hyperedges) >= spec.drop_rate)[edge_ids]

    override = Hypergraph.from_memberships(
        h.num_nodes, h.num_hyperedges, node_ids[keep], edge_ids[keep]
    )
    return NoiseView(features, override, view_index)


def generate_view(
    h: Hypergraph,
    x: FeatureMatrix,
    spec: AugmentationSpec,
    view_index: int,
    epoch: int = 0,
) -> NoiseView:
    if spec.kind.is_noise:
        return perturb_features(x, spec, view_index, epoch)
    return drop_augment(h, spec, view_index, epoch, features=x)


def generate_views(
    h: Hypergraph, x: FeatureMatrix, spec: AugmentationSpec, epoch: int = 0
) -> List[NoiseView]:
    """The M = `spec.num_views` views of one epoch, in view-index order."""
    return [generate_view(h, x, spec, m, epoch) for m in range(spec.num_views)]
