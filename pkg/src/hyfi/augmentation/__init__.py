"""Noise views: topology-preserving feature perturbation and drop augmentation."""
from hyfi.augmentation.spec import AugmentationKind, AugmentationSpec
from hyfi.augmentation.views import (
    NoiseView,
    drop_augment,
    generate_view,
    generate_views,
    perturb_features,
)

__all__ = [
    "AugmentationKind",
    "AugmentationSpec",
    "NoiseView",
    "drop_augment",
    "generate_view",
    "generate_views",
    "perturb_features",
]
