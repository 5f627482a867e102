"""Exact gradients, AdamW and the epoch loop."""
from hyfi.training.config import EncoderConfig, TrainConfig
from hyfi.training.objective import LossRecord, ObjectiveContext, backward, forward_loss
from hyfi.training.optimizer import OptimizerState, adamw_step, adamw_update
from hyfi.training.trainer import TrainResult, initial_parameters, train

__all__ = [
    "EncoderConfig",
    "LossRecord",
    "ObjectiveContext",
    "OptimizerState",
    "TrainConfig",
    "TrainResult",
    "adamw_step",
    "adamw_update",
    "backward",
    "forward_loss",
    "initial_parameters",
    "train",
]
