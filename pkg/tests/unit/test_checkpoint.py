import numpy as np
import pytest
import ujson

from hyfi.logging.exceptions import CheckpointException
from hyfi.nn.init import init_parameters
from hyfi.objects.parameters import ModelParameters
from hyfi.serialization import (
    deserialize_tensor,
    hash_tensor,
    load_checkpoint,
    save_checkpoint,
    serialize_tensor,
)
from hyfi.transports import MemoryTransport, SQLiteTransport


@pytest.fixture()
def params() -> ModelParameters:
    encoder, projection = init_parameters([4, 6, 5], 3, seed=9)
    return ModelParameters(encoder, projection)


def assert_same_parameters(a: ModelParameters, b: ModelParameters) -> None:
    assert a.encoder.activation == b.encoder.activation
    assert sorted(a.tensors()) == sorted(b.tensors())
    for name, tensor in a.tensors().items():
        assert np.array_equal(tensor, b.tensors()[name]), name


def test_tensor_header():
    header, content = serialize_tensor("w", np.arange(6.0).reshape(2, 3))
    fields = ujson.loads(header)
    assert fields["shape"] == [2, 3]
    assert fields["dtype"] == "<f8"
    assert fields["hash"] == hash_tensor("w", (2, 3), content)
    assert len(fields["hash"]) == 32
    assert len(content) == 48


def test_hash_depends_on_the_name():
    _, content = serialize_tensor("w", np.ones(2))
    assert hash_tensor("w", (2,), content) != hash_tensor("v", (2,), content)


def test_memory_round_trip(params: ModelParameters):
    transport = MemoryTransport()
    save_checkpoint(params, transport, {"epoch": 12, "master_seed": 5})
    checkpoint = load_checkpoint(transport)
    assert_same_parameters(params, checkpoint.params)
    assert checkpoint.epoch == 12
    assert checkpoint.meta["master_seed"] == 5
    assert checkpoint.meta["activation"] == "prelu"


def test_sqlite_round_trip(params: ModelParameters, tmp_path):
    transport = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
    save_checkpoint(params, transport, {"epoch": 1})
    transport.close()
    assert (tmp_path / "checkpoint.db").is_file()

    reopened = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
    checkpoint = load_checkpoint(reopened)
    reopened.close()
    assert_same_parameters(params, checkpoint.params)
    assert reopened.has_tensors(["node_head.bias1", "nothing"]) == {
        "node_head.bias1": True,
        "nothing": False,
    }


def test_sqlite_small_batches(params: ModelParameters, tmp_path):
    transport = SQLiteTransport(
        base_path=str(tmp_path), scope="batched", max_batch_size_mb=0.0001
    )
    save_checkpoint(params, transport)
    assert transport.tensor_names() == sorted(params.tensors())
    assert_same_parameters(params, load_checkpoint(transport).params)


def test_corrupt_tensor_is_named(params: ModelParameters):
    transport = MemoryTransport()
    save_checkpoint(params, transport)
    header, content = transport.tensors["encoder.1.node_weight"]
    damaged = bytearray(content)
    damaged[3] ^= 0xFF
    transport.tensors["encoder.1.node_weight"] = (header, bytes(damaged))

    with pytest.raises(CheckpointException, match="encoder.1.node_weight") as info:
        load_checkpoint(transport)
    assert info.value.tensor_name == "encoder.1.node_weight"


def test_truncated_tensor():
    header, content = serialize_tensor("b", np.ones(4))
    with pytest.raises(CheckpointException, match="holds 24 bytes"):
        deserialize_tensor("b", header, content[:24])


def test_missing_tensor(params: ModelParameters):
    transport = MemoryTransport()
    save_checkpoint(params, transport)
    del transport.tensors["edge_head.weight2"]
    with pytest.raises(CheckpointException, match="edge_head.weight2"):
        load_checkpoint(transport)


def test_empty_transport():
    with pytest.raises(CheckpointException, match="holds no tensors"):
        load_checkpoint(MemoryTransport())


@pytest.mark.parametrize("kind", ["memory", "sqlite"])
def test_saving_replaces_a_deeper_model(kind, tmp_path):
    if kind == "memory":
        transport = MemoryTransport()
    else:
        transport = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
    deep = ModelParameters(*init_parameters([4, 6, 6], 3, seed=1))
    shallow = ModelParameters(*init_parameters([4, 6], 3, seed=2))
    save_checkpoint(deep, transport, {"epoch": 7, "master_seed": 1})
    save_checkpoint(shallow, transport, {"master_seed": 2})

    if kind == "sqlite":
        transport.close()
        transport = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
    checkpoint = load_checkpoint(transport)
    assert len(checkpoint.params.encoder.layers) == 1
    assert not any(name.startswith("encoder.1.") for name in transport.tensor_names())
    assert_same_parameters(shallow, checkpoint.params)
    assert checkpoint.epoch is None
    assert checkpoint.meta["master_seed"] == 2
