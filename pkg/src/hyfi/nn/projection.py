from typing import Tuple

import numpy as np
from attrs import define

from hyfi.logging.exceptions import DimensionMismatchException
from hyfi.nn.activations import elu, elu_grad
from hyfi.objects.parameters import GradientSet, ProjectionHead, ProjectionParameters

__all__ = ["HeadTrace", "head_forward", "head_backward", "project"]


@define
class HeadTrace:
    inputs: np.ndarray
    hidden_pre: np.ndarray
    hidden: np.ndarray
    output: np.ndarray


def head_forward(head: ProjectionHead, x: np.ndarray, name: str = "head") -> HeadTrace:
    if x.shape[1] != head.in_dim:
        raise DimensionMismatchException(
            f"{name} expects {head.in_dim} input columns, got {x.shape[1]}"
        )
    hidden_pre = x @ head.weight1 + head.bias1
    hidden = elu(hidden_pre)
    return HeadTrace(x, hidden_pre, hidden, hidden @ head.weight2 + head.bias2)


def head_backward(
    head: ProjectionHead,
    trace: HeadTrace,
    d_out: np.ndarray,
    grads: GradientSet,
    prefix: str,
) -> np.ndarray:
    """Accumulate head gradients under `prefix` and return d(loss)/d(input)."""
    grads.add(f"{prefix}.weight2", trace.hidden.T @ d_out)
    grads.add(f"{prefix}.bias2", d_out.sum(axis=0))
    d_hidden_pre = (d_out @ head.weight2.T) * elu_grad(trace.hidden_pre)
    grads.add(f"{prefix}.weight1", trace.inputs.T @ d_hidden_pre)
    grads.add(f"{prefix}.bias1", d_hidden_pre.sum(axis=0))
    return d_hidden_pre @ head.weight1.T


def project(
    p: np.ndarray, q: np.ndarray, heads: ProjectionParameters
) -> Tuple[np.ndarray, np.ndarray]:
    """Z = g_phi(P) and Y = g_psi(Q), applied row-wise."""
    z = head_forward(heads.node_head, p, "node head").output
    y = head_forward(heads.edge_head, q, "edge head").output
    return z, y
