from typing import Dict, Tuple

import numpy as np
from attrs import define, field

from hyfi.logging.exceptions import DimensionMismatchException
from hyfi.objects.parameters import GradientSet, ModelParameters
from hyfi.training.config import TrainConfig

__all__ = ["OptimizerState", "adamw_step", "adamw_update"]

TensorDict = Dict[str, np.ndarray]


@define
class OptimizerState:
    first_moment: TensorDict = field(factory=dict)
    second_moment: TensorDict = field(factory=dict)
    step: int = 0

    @classmethod
    def for_tensors(cls, tensors: TensorDict) -> "OptimizerState":
        return cls(
            {name: np.zeros_like(t) for name, t in tensors.items()},
            {name: np.zeros_like(t) for name, t in tensors.items()},
        )

    @classmethod
    def zeros_like(cls, params: ModelParameters) -> "OptimizerState":
        return cls.for_tensors(params.tensors())


def _check(tensors: TensorDict, grads: TensorDict, state: OptimizerState) -> None:
    for name, tensor in tensors.items():
        for what, other in (
            ("gradient", grads.get(name)),
            ("first moment", state.first_moment.get(name)),
            ("second moment", state.second_moment.get(name)),
        ):
            if other is None:
                raise DimensionMismatchException(f"no {what} for parameter '{name}'")
            if other.shape != tensor.shape:
                raise DimensionMismatchException(
                    f"{what} of '{name}' has shape {other.shape}, parameter has"
                    f" {tensor.shape}"
                )


def adamw_update(
    tensors: TensorDict,
    grads: TensorDict,
    state: OptimizerState,
    learning_rate: float,
    weight_decay: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One decoupled-weight-decay Adam update of `tensors`, in place.

    p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p, with the decay
    taken on the pre-update p.
    """
    _check(tensors, grads, state)
    state.step += 1
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step
    for name, p in tensors.items():
        g = grads[name]
        m = state.first_moment[name]
        v = state.second_moment[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        update = learning_rate * (m / correction1) / (np.sqrt(v / correction2) + eps)
        update += learning_rate * weight_decay * p
        p -= update


def adamw_step(
    params: ModelParameters,
    grads: GradientSet,
    state: OptimizerState,
    cfg: TrainConfig,
) -> Tuple[ModelParameters, OptimizerState]:
    adamw_update(
        params.tensors(),
        grads.tensors,
        state,
        learning_rate=cfg.learning_rate,
        weight_decay=cfg.weight_decay,
        beta1=cfg.adam_beta1,
        beta2=cfg.adam_beta2,
        eps=cfg.adam_eps,
    )
    return params, state
