from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from attrs import define, field

from hyfi.logging.exceptions import DimensionMismatchException, NonFiniteException
from hyfi.nn.activations import Activation

__all__ = [
    "EncoderLayer",
    "EncoderParameters",
    "ProjectionHead",
    "ProjectionParameters",
    "ModelParameters",
    "GradientSet",
    "ViewEmbeddings",
]

TensorDict = Dict[str, np.ndarray]


@define
class EncoderLayer:
    """Weights of one two-phase HGNN layer (node -> hyperedge -> node)."""

    edge_weight: np.ndarray  # d_{k-1} x d''_k
    edge_bias: np.ndarray  # d''_k
    node_weight: np.ndarray  # d''_k x d'_k
    node_bias: np.ndarray  # d'_k
    slope: Optional[np.ndarray] = None  # (1,) PReLU slope shared by both phases

    @property
    def in_dim(self) -> int:
        return self.edge_weight.shape[0]

    @property
    def edge_dim(self) -> int:
        return self.edge_weight.shape[1]

    @property
    def node_dim(self) -> int:
        return self.node_weight.shape[1]

    def named_tensors(self) -> Iterator[Tuple[str, np.ndarray]]:
        yield "edge_weight", self.edge_weight
        yield "edge_bias", self.edge_bias
        yield "node_weight", self.node_weight
        yield "node_bias", self.node_bias
        if self.slope is not None:
            yield "slope", self.slope


@define
class EncoderParameters:
    layers: List[EncoderLayer]
    activation: Activation = Activation.PRELU

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def node_dim(self) -> int:
        return self.layers[-1].node_dim

    @property
    def edge_dim(self) -> int:
        return self.layers[-1].edge_dim

    def check(self) -> None:
        for k, layer in enumerate(self.layers):
            if layer.edge_weight.shape[1] != layer.edge_bias.shape[0]:
                raise DimensionMismatchException(f"encoder.{k}: edge bias size")
            if layer.node_weight.shape[0] != layer.edge_dim:
                raise DimensionMismatchException(f"encoder.{k}: node weight rows")
            if layer.node_weight.shape[1] != layer.node_bias.shape[0]:
                raise DimensionMismatchException(f"encoder.{k}: node bias size")
            if k and layer.in_dim != self.layers[k - 1].node_dim:
                raise DimensionMismatchException(
                    f"encoder.{k}: expects input dim {layer.in_dim} but layer"
                    f" {k - 1} emits {self.layers[k - 1].node_dim}"
                )
            if self.activation.has_slope and layer.slope is None:
                raise DimensionMismatchException(f"encoder.{k}: missing PReLU slope")

    def named_tensors(self) -> Iterator[Tuple[str, np.ndarray]]:
        for k, layer in enumerate(self.layers):
            for name, tensor in layer.named_tensors():
                yield f"encoder.{k}.{name}", tensor


@define
class ProjectionHead:
    """Two affine layers with an ELU in between: W2 elu(W1 x + b1) + b2."""

    weight1: np.ndarray
    bias1: np.ndarray
    weight2: np.ndarray
    bias2: np.ndarray

    @property
    def in_dim(self) -> int:
        return self.weight1.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weight2.shape[1]

    def named_tensors(self) -> Iterator[Tuple[str, np.ndarray]]:
        yield "weight1", self.weight1
        yield "bias1", self.bias1
        yield "weight2", self.weight2
        yield "bias2", self.bias2


@define
class ProjectionParameters:
    node_head: ProjectionHead  # g_phi
    edge_head: ProjectionHead  # g_psi

    def named_tensors(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name, tensor in self.node_head.named_tensors():
            yield f"node_head.{name}", tensor
        for name, tensor in self.edge_head.named_tensors():
            yield f"edge_head.{name}", tensor


@define
class ModelParameters:
    """Encoder f_theta plus both projection heads, addressable by tensor name."""

    encoder: EncoderParameters
    projection: ProjectionParameters

    def tensors(self) -> TensorDict:
        named = dict(self.encoder.named_tensors())
        named.update(self.projection.named_tensors())
        return named

    def check(self) -> None:
        self.encoder.check()
        if self.projection.node_head.in_dim != self.encoder.node_dim:
            raise DimensionMismatchException(
                f"node head expects {self.projection.node_head.in_dim} inputs but the"
                f" encoder emits {self.encoder.node_dim}"
            )
        if self.projection.edge_head.in_dim != self.encoder.edge_dim:
            raise DimensionMismatchException(
                f"edge head expects {self.projection.edge_head.in_dim} inputs but the"
                f" encoder emits {self.encoder.edge_dim}"
            )

    @classmethod
    def from_tensors(
        cls, tensors: TensorDict, activation: Activation
    ) -> "ModelParameters":
        """Rebuild from a flat name -> tensor mapping (see `tensors`)."""
        try:
            layer_count = 1 + max(
                int(name.split(".")[1]) for name in tensors if name.startswith("encoder.")
            )
            layers = [
                EncoderLayer(
                    edge_weight=tensors[f"encoder.{k}.edge_weight"],
                    edge_bias=tensors[f"encoder.{k}.edge_bias"],
                    node_weight=tensors[f"encoder.{k}.node_weight"],
                    node_bias=tensors[f"encoder.{k}.node_bias"],
                    slope=tensors.get(f"encoder.{k}.slope"),
                )
                for k in range(layer_count)
            ]
            heads = {
                prefix: ProjectionHead(
                    weight1=tensors[f"{prefix}.weight1"],
                    bias1=tensors[f"{prefix}.bias1"],
                    weight2=tensors[f"{prefix}.weight2"],
                    bias2=tensors[f"{prefix}.bias2"],
                )
                for prefix in ("node_head", "edge_head")
            }
        except (KeyError, ValueError) as ex:
            raise DimensionMismatchException(
                f"incomplete parameter set: missing {ex}", exception=ex
            ) from ex
        params = cls(
            EncoderParameters(layers, activation),
            ProjectionParameters(heads["node_head"], heads["edge_head"]),
        )
        params.check()
        return params

    def copy(self) -> "ModelParameters":
        return ModelParameters.from_tensors(
            {name: t.copy() for name, t in self.tensors().items()},
            self.encoder.activation,
        )


@define
class GradientSet:
    """One gradient tensor per parameter tensor, keyed like `ModelParameters.tensors`."""

    tensors: TensorDict = field(factory=dict)

    @classmethod
    def zeros_like(cls, params: ModelParameters) -> "GradientSet":
        return cls({name: np.zeros_like(t) for name, t in params.tensors().items()})

    def add(self, name: str, grad: np.ndarray) -> None:
        self.tensors[name] += grad

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def check_finite(self, epoch: Optional[int] = None) -> None:
        for name, grad in self.tensors.items():
            if not np.all(np.isfinite(grad)):
                raise NonFiniteException(f"grad:{name}", epoch)

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self.tensors.values())))


@define
class ViewEmbeddings:
    """Encoder outputs (P, Q) and their projections (Z, Y) for one view."""

    node_embed: np.ndarray  # P
    edge_embed: np.ndarray  # Q
    node_proj: np.ndarray  # Z
    edge_proj: np.ndarray  # Y
