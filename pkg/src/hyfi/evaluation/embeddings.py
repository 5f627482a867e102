from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np

from hyfi.nn.encoder import encode
from hyfi.nn.projection import head_forward
from hyfi.objects.features import FeatureMatrix
from hyfi.objects.hypergraph import Hypergraph
from hyfi.objects.parameters import ModelParameters

__all__ = ["Representation", "node_embeddings", "write_embeddings_csv"]

EMBEDDINGS_CSV = "embeddings.csv"


class Representation(str, Enum):
    """Which frozen node representation feeds the linear classifier."""

    ENCODER = "encoder"  # P, the encoder output of the origin graph
    PROJECTION = "projection"  # Z, P passed through the node projection head


def node_embeddings(
    h: Hypergraph,
    x: FeatureMatrix,
    params: ModelParameters,
    self_loops: bool = True,
    representation: Union[Representation, str] = Representation.ENCODER,
) -> np.ndarray:
    representation = Representation(representation)
    graph = h.with_self_loops() if self_loops else h
    p = encode(graph, x, params.encoder).node_embed
    if representation is Representation.ENCODER:
        return p
    return head_forward(params.projection.node_head, p, "node head").output


def write_embeddings_csv(embeddings: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, embeddings, delimiter=",", fmt="%.17g")
    return path
