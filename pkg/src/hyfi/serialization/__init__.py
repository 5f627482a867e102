from hyfi.serialization.tensor_serializer import (
    Checkpoint,
    deserialize_tensor,
    hash_tensor,
    load_checkpoint,
    save_checkpoint,
    serialize_tensor,
)

__all__ = [
    "Checkpoint",
    "deserialize_tensor",
    "hash_tensor",
    "load_checkpoint",
    "save_checkpoint",
    "serialize_tensor",
]
