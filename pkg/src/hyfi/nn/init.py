import math
from typing import Sequence, Tuple, Union

import numpy as np

from hyfi.core.helpers.random import stream
from hyfi.logging.exceptions import DimensionMismatchException
from hyfi.nn.activations import PRELU_INIT_SLOPE, Activation
from hyfi.objects.parameters import (
    EncoderLayer,
    EncoderParameters,
    ProjectionHead,
    ProjectionParameters,
)

__all__ = ["glorot_bound", "glorot_uniform", "init_parameters"]


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = glorot_bound(fan_in, fan_out)
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def _head(rng: np.random.Generator, in_dim: int, proj_dim: int) -> ProjectionHead:
    return ProjectionHead(
        weight1=glorot_uniform(rng, in_dim, proj_dim),
        bias1=np.zeros(proj_dim),
        weight2=glorot_uniform(rng, proj_dim, proj_dim),
        bias2=np.zeros(proj_dim),
    )


def init_parameters(
    dims: Sequence[int],
    proj_dim: int,
    seed: int,
    activation: Union[Activation, str] = Activation.PRELU,
) -> Tuple[EncoderParameters, ProjectionParameters]:
    """Glorot-uniform weights and zero biases for an encoder and both heads.

    `dims` lists the input feature dim followed by one output dim per layer;
    node and hyperedge channels of a layer share its width. Both projection
    heads map the last width to `proj_dim` with a hidden width of `proj_dim`.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise DimensionMismatchException(
            f"dims needs an input dim and at least one layer dim, got {dims}"
        )
    if min(dims) <= 0 or proj_dim <= 0:
        raise DimensionMismatchException(
            f"all dimensions must be positive, got dims={dims}, proj_dim={proj_dim}"
        )
    activation = Activation(activation)
    rng = stream(seed, "init")

    layers = []
    for d_in, d_out in zip(dims, dims[1:]):
        layers.append(
            EncoderLayer(
                edge_weight=glorot_uniform(rng, d_in, d_out),
                edge_bias=np.zeros(d_out),
                node_weight=glorot_uniform(rng, d_out, d_out),
                node_bias=np.zeros(d_out),
                slope=np.array([PRELU_INIT_SLOPE]) if activation.has_slope else None,
            )
        )
    encoder = EncoderParameters(layers, activation)
    projection = ProjectionParameters(
        node_head=_head(rng, dims[-1], proj_dim),
        edge_head=_head(rng, dims[-1], proj_dim),
    )
    return encoder, projection
