from enum import Enum

from pydantic import Field

from hyfi.core.helpers.random import SEED_LIMIT
from hyfi.core.models import HyfiModel

__all__ = ["AugmentationKind", "AugmentationSpec"]


class AugmentationKind(str, Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    BERNOULLI = "bernoulli"
    DROP_INCIDENCE = "drop_incidence"
    DROP_NODE = "drop_node"
    DROP_HYPEREDGE = "drop_hyperedge"

    @property
    def is_noise(self) -> bool:
        """Feature perturbations leave the topology untouched."""
        return self in (
            AugmentationKind.GAUSSIAN,
            AugmentationKind.UNIFORM,
            AugmentationKind.BERNOULLI,
        )

    @property
    def is_drop(self) -> bool:
        return not self.is_noise


class AugmentationSpec(HyfiModel):
    """How noise views are generated.

    `sigma` is the noise scale: the standard deviation of the Gaussian draw
    and the upper end of the uniform draw.
    """

    kind: AugmentationKind = AugmentationKind.GAUSSIAN
    sigma: float = Field(default=0.1, ge=0.0)
    flip_prob: float = Field(default=0.2, ge=0.0, le=1.0)
    drop_rate: float = Field(default=0.2, ge=0.0, le=1.0)
    num_views: int = Field(default=2, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
