from enum import Enum
from typing import Optional, Tuple

import numpy as np

__all__ = ["Activation", "elu", "elu_grad"]

PRELU_INIT_SLOPE = 0.25


def elu(x: np.ndarray) -> np.ndarray:
    # expm1 on the clipped input keeps the positive branch overflow free
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def elu_grad(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, 1.0, np.exp(np.minimum(x, 0.0)))


class Activation(str, Enum):
    """Element-wise nonlinearity of the encoder phases."""

    RELU = "relu"
    PRELU = "prelu"
    ELU = "elu"
    IDENTITY = "identity"

    @property
    def has_slope(self) -> bool:
        return self is Activation.PRELU

    def forward(self, x: np.ndarray, slope: Optional[np.ndarray] = None) -> np.ndarray:
        if self is Activation.RELU:
            return np.maximum(x, 0.0)
        if self is Activation.PRELU:
            return np.where(x > 0, x, float(slope[0]) * x)
        if self is Activation.ELU:
            return elu(x)
        return x

    def backward(
        self, grad: np.ndarray, x: np.ndarray, slope: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """Pull `grad` back through the activation evaluated at `x`.

        Returns the input gradient and, for PReLU, the slope gradient.
        """
        if self is Activation.RELU:
            return grad * (x > 0), None
        if self is Activation.PRELU:
            negative = x <= 0
            dslope = np.array([np.sum(grad[negative] * x[negative])])
            return np.where(negative, float(slope[0]) * grad, grad), dslope
        if self is Activation.ELU:
            return grad * elu_grad(x), None
        return grad, None
