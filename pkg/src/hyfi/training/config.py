from typing import List

from pydantic import Field

from hyfi.augmentation.spec import AugmentationSpec
from hyfi.core.helpers.random import SEED_LIMIT
from hyfi.core.models import HyfiModel
from hyfi.loss.config import LossConfig
from hyfi.nn.activations import Activation

__all__ = ["EncoderConfig", "TrainConfig"]


class EncoderConfig(HyfiModel):
    hidden_dim: int = Field(default=256, ge=1)
    layers: int = Field(default=1, ge=1)
    proj_dim: int = Field(default=256, ge=1)
    activation: Activation = Activation.PRELU
    # one singleton hyperedge per node while encoding
    self_loops: bool = True

    def dims(self, feature_dim: int) -> List[int]:
        return [int(feature_dim)] + [self.hidden_dim] * self.layers


class TrainConfig(HyfiModel):
    epochs: int = Field(default=300, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    weight_decay: float = Field(default=1e-5, ge=0.0)
    adam_beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.999, gt=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    loss: LossConfig = Field(default_factory=LossConfig)
    augmentation: AugmentationSpec = Field(default_factory=AugmentationSpec)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    master_seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    checkpoint_every: int = Field(default=0, ge=0)
    log_every: int = Field(default=10, ge=1)
    loss_chunk_size: int = Field(default=2048, ge=1)

    def view_spec(self) -> AugmentationSpec:
        """The augmentation spec with its seed tied to `master_seed`."""
        return self.augmentation.model_copy(update={"seed": self.master_seed})
