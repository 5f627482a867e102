import hashlib
from typing import Any, Dict, Optional, Tuple

import numpy as np
import ujson
from attrs import define, field

from hyfi.logging.exceptions import CheckpointException, HyfiException
from hyfi.nn.activations import Activation
from hyfi.objects.parameters import ModelParameters
from hyfi.transports.abstract_transport import AbstractTransport

TENSOR_DTYPE = "<f8"
ACTIVATION_KEY = "activation"


def hash_tensor(name: str, shape: Tuple[int, ...], content: bytes) -> str:
    header = ujson.dumps({"name": name, "shape": list(shape), "dtype": TENSOR_DTYPE})
    return hashlib.sha256(header.encode() + content).hexdigest()[:32]


def serialize_tensor(name: str, tensor: np.ndarray) -> Tuple[str, bytes]:
    """Row-major little-endian float64 bytes plus a header carrying shape and hash."""
    array = np.ascontiguousarray(tensor, dtype=TENSOR_DTYPE)
    content = array.tobytes(order="C")
    shape = tuple(int(s) for s in array.shape)
    header = ujson.dumps(
        {
            "shape": list(shape),
            "dtype": TENSOR_DTYPE,
            "hash": hash_tensor(name, shape, content),
        }
    )
    return header, content


def deserialize_tensor(name: str, header: str, content: bytes) -> np.ndarray:
    try:
        fields = ujson.loads(header)
        shape = tuple(int(s) for s in fields["shape"])
        dtype, digest = fields["dtype"], fields["hash"]
    except (ValueError, KeyError, TypeError) as ex:
        raise CheckpointException(
            f"tensor '{name}' has a malformed header", tensor_name=name, exception=ex
        ) from ex
    if dtype != TENSOR_DTYPE:
        raise CheckpointException(
            f"tensor '{name}' has dtype {dtype!r}, expected {TENSOR_DTYPE!r}",
            tensor_name=name,
        )
    expected_size = int(np.prod(shape, dtype=np.int64)) * 8
    if len(content) != expected_size:
        raise CheckpointException(
            f"tensor '{name}' holds {len(content)} bytes but shape {list(shape)} needs"
            f" {expected_size}",
            tensor_name=name,
        )
    if hash_tensor(name, shape, content) != digest:
        raise CheckpointException(
            f"tensor '{name}' failed its content hash check", tensor_name=name
        )
    array = np.frombuffer(content, dtype=TENSOR_DTYPE).reshape(shape)
    return array.astype(np.float64, copy=True)


@define
class Checkpoint:
    params: ModelParameters
    meta: Dict[str, Any] = field(factory=dict)

    @property
    def epoch(self) -> Optional[int]:
        return self.meta.get("epoch")


def save_checkpoint(
    params: ModelParameters,
    transport: AbstractTransport,
    meta: Optional[Dict[str, Any]] = None,
) -> None:
    """Replace the contents of `transport` with every parameter tensor plus
    JSON-encoded metadata."""
    params.check()
    transport.clear()
    transport.begin_write()
    for name, tensor in params.tensors().items():
        header, content = serialize_tensor(name, tensor)
        transport.save_tensor(name, header, content)
    transport.end_write()
    entries = dict(meta or {})
    entries[ACTIVATION_KEY] = params.encoder.activation.value
    for key in sorted(entries):
        transport.save_meta(key, ujson.dumps(entries[key]))


def load_checkpoint(transport: AbstractTransport) -> Checkpoint:
    names = transport.tensor_names()
    if not names:
        raise CheckpointException(f"{transport.name} transport holds no tensors")
    tensors = {}
    for name in names:
        stored = transport.get_tensor(name)
        if stored is None:
            raise CheckpointException(f"tensor '{name}' vanished", tensor_name=name)
        tensors[name] = deserialize_tensor(name, *stored)

    meta: Dict[str, Any] = {}
    for key in ("activation", "epoch", "encoder", "feature_dim", "master_seed"):
        raw = transport.get_meta(key)
        if raw is None:
            continue
        try:
            meta[key] = ujson.loads(raw)
        except ValueError as ex:
            raise CheckpointException(
                f"checkpoint metadata '{key}' is not valid JSON", exception=ex
            ) from ex

    try:
        activation = Activation(meta.get(ACTIVATION_KEY, Activation.PRELU.value))
        params = ModelParameters.from_tensors(tensors, activation)
    except (ValueError, HyfiException) as ex:
        raise CheckpointException(
            f"checkpoint tensors do not form a model: {ex}", exception=ex
        ) from ex
    return Checkpoint(params, meta)
