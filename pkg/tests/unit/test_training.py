import csv

import numpy as np
import pytest
from pydantic import ValidationError

from hyfi.augmentation import AugmentationSpec, generate_views
from hyfi.logging.exceptions import DimensionMismatchException, NonFiniteException
from hyfi.loss import LossConfig
from hyfi.objects import FeatureMatrix, Hypergraph, LabelVector
from hyfi.serialization import load_checkpoint
from hyfi.training import (
    EncoderConfig,
    ObjectiveContext,
    OptimizerState,
    TrainConfig,
    adamw_update,
    backward,
    forward_loss,
    initial_parameters,
    train,
)
from hyfi.training.trainer import LOSS_LOG_NAME
from hyfi.transports import MemoryTransport, SQLiteTransport


def tiny_config(**overrides) -> TrainConfig:
    fields = {
        "epochs": 4,
        "learning_rate": 1e-2,
        "encoder": EncoderConfig(hidden_dim=8, proj_dim=8),
        "augmentation": AugmentationSpec(num_views=2, sigma=0.1),
        "master_seed": 3,
    }
    fields.update(overrides)
    return TrainConfig(**fields)


class TestObjective:
    def test_backward_matches_forward(self, planted_dataset):
        h, x, _ = planted_dataset
        cfg = tiny_config()
        params = initial_parameters(x.feature_dim, cfg)
        views = generate_views(h, x, cfg.view_spec(), epoch=1)
        ctx = ObjectiveContext.build(h, cfg.encoder.self_loops)
        record, _ = backward(h, x, views, params, cfg, ctx=ctx)
        assert record == forward_loss(h, x, views, params, cfg, ctx=ctx)
        assert record.total == record.node + cfg.loss.alpha * record.edge

    def test_zero_alpha_leaves_the_edge_head_alone(self, planted_dataset):
        h, x, _ = planted_dataset
        cfg = tiny_config(loss=LossConfig(alpha=0.0))
        params = initial_parameters(x.feature_dim, cfg)
        views = generate_views(h, x, cfg.view_spec(), epoch=1)
        record, grads = backward(h, x, views, params, cfg)
        assert record.total == record.node
        for name, grad in grads.tensors.items():
            if name.startswith("edge_head."):
                assert not np.any(grad), name

    def test_non_finite_parameters(self, planted_dataset):
        h, x, _ = planted_dataset
        cfg = tiny_config()
        params = initial_parameters(x.feature_dim, cfg)
        params.encoder.layers[0].edge_weight[0, 0] = np.nan
        with pytest.raises(NonFiniteException):
            forward_loss(h, x, [], params, cfg)


class TestAdamW:
    def test_weight_decay_only(self):
        tensors = {"p": np.ones(3)}
        state = OptimizerState.for_tensors(tensors)
        adamw_update(tensors, {"p": np.zeros(3)}, state, learning_rate=0.1, weight_decay=0.01)
        np.testing.assert_allclose(tensors["p"], 0.999, rtol=1e-15)
        assert state.step == 1

    def test_first_step_moves_by_the_learning_rate(self):
        tensors = {"p": np.array([1.0, -2.0, 0.5])}
        state = OptimizerState.for_tensors(tensors)
        grads = {"p": np.array([3.0, -0.1, 1e-3])}
        adamw_update(tensors, grads, state, learning_rate=0.01, weight_decay=0.0)
        np.testing.assert_allclose(tensors["p"], [0.99, -1.99, 0.49], rtol=1e-6)

    def test_shape_mismatch(self):
        tensors = {"p": np.ones(3)}
        state = OptimizerState.for_tensors(tensors)
        with pytest.raises(DimensionMismatchException):
            adamw_update(tensors, {"p": np.ones(4)}, state, 0.1, 0.0)
        with pytest.raises(DimensionMismatchException):
            adamw_update(tensors, {}, state, 0.1, 0.0)


class TestTrain:
    def test_is_deterministic(self, planted_dataset):
        h, x, labels = planted_dataset
        first = train(h, x, labels, tiny_config())
        second = train(h, x, None, tiny_config())
        assert first.losses() == second.losses()
        for name, tensor in first.params.tensors().items():
            assert np.array_equal(tensor, second.params.tensors()[name]), name

    def test_seed_changes_the_run(self, planted_dataset):
        h, x, labels = planted_dataset
        first = train(h, x, labels, tiny_config(master_seed=1))
        second = train(h, x, labels, tiny_config(master_seed=2))
        assert first.losses() != second.losses()

    def test_writes_loss_log_and_checkpoint(self, planted_dataset, tmp_path):
        h, x, labels = planted_dataset
        cfg = tiny_config(epochs=3)
        result = train(h, x, labels, cfg, run_dir=tmp_path)

        with open(tmp_path / LOSS_LOG_NAME, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["epoch", "loss_node", "loss_edge", "loss_total"]
        assert [row[0] for row in rows[1:]] == ["1", "2", "3"]
        assert float(rows[-1][3]) == result.history[-1].total

        transport = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
        checkpoint = load_checkpoint(transport)
        transport.close()
        assert checkpoint.epoch == 3
        assert checkpoint.meta["feature_dim"] == x.feature_dim
        assert checkpoint.meta["master_seed"] == cfg.master_seed
        for name, tensor in result.params.tensors().items():
            assert np.array_equal(checkpoint.params.tensors()[name], tensor), name

    def test_periodic_checkpoints(self, planted_dataset):
        h, x, labels = planted_dataset
        transport = MemoryTransport()
        train(h, x, labels, tiny_config(epochs=4, checkpoint_every=2), transport=transport)
        assert load_checkpoint(transport).epoch == 4

    def test_loss_goes_down(self, planted_dataset):
        h, x, labels = planted_dataset
        result = train(h, x, labels, tiny_config(epochs=40))
        losses = result.losses()
        assert np.mean(losses[-5:]) < np.mean(losses[:5])

    @pytest.mark.parametrize(
        "fields",
        [
            {"epochs": 0},
            {"learning_rate": 0.0},
            {"loss_chunk_size": 0},
            {"master_seed": 2**64},
            {"master_seed": -1},
            {"encoder": {"hiddenDim": 0}},
        ],
    )
    def test_invalid_config(self, fields):
        with pytest.raises(ValidationError):
            TrainConfig(**fields)

    def test_view_spec_follows_the_master_seed(self):
        cfg = tiny_config(master_seed=77)
        assert cfg.view_spec().seed == 77
        assert cfg.augmentation.seed == 0


DROP_KINDS = ["drop_incidence", "drop_node", "drop_hyperedge"]


def unit_features(num_nodes: int, seed: int = 0) -> FeatureMatrix:
    return FeatureMatrix(np.random.default_rng(seed).random((num_nodes, 3)))


class TestDropViews:
    @pytest.mark.parametrize("kind", DROP_KINDS)
    @pytest.mark.parametrize(
        "h, self_loops",
        [
            # node 4 belongs to no hyperedge
            (Hypergraph(5, [[0, 1], [1, 2], [2, 3]]), True),
            # the two hyperedges share no node
            (Hypergraph(4, [[0, 1], [2, 3]]), True),
            (Hypergraph(4, [[0, 1], [2, 3]]), False),
        ],
    )
    def test_trains_on_graphs_without_partners(self, h, self_loops, kind):
        cfg = tiny_config(
            epochs=20,
            encoder=EncoderConfig(hidden_dim=8, proj_dim=8, self_loops=self_loops),
            augmentation=AugmentationSpec(kind=kind, drop_rate=0.5, num_views=2),
        )
        result = train(h, unit_features(h.num_nodes), None, cfg)
        assert len(result.history) == 20
        assert all(np.isfinite(loss) for loss in result.losses())

    @pytest.mark.parametrize("kind", DROP_KINDS)
    def test_emptied_hyperedges_without_partners_sit_out(self, kind):
        h = Hypergraph(4, [[0, 1], [2, 3]])
        x = unit_features(4)
        cfg = tiny_config(augmentation=AugmentationSpec(kind=kind, drop_rate=1.0))
        params = initial_parameters(x.feature_dim, cfg)
        views = generate_views(h, x, cfg.view_spec(), epoch=1)
        record, grads = backward(h, x, views, params, cfg)
        assert record.edge == 0.0
        assert np.isfinite(record.node)
        for name, grad in grads.tensors.items():
            if name.startswith("edge_head."):
                assert not np.any(grad), name


def test_retraining_into_a_run_directory_replaces_the_checkpoint(planted_dataset, tmp_path):
    h, x, _ = planted_dataset
    deep = EncoderConfig(hidden_dim=8, proj_dim=8, layers=2)
    train(h, x, None, tiny_config(epochs=1, encoder=deep), run_dir=tmp_path)
    result = train(h, x, None, tiny_config(epochs=1), run_dir=tmp_path)

    transport = SQLiteTransport(base_path=str(tmp_path), scope="checkpoint")
    checkpoint = load_checkpoint(transport)
    transport.close()
    assert len(checkpoint.params.encoder.layers) == 1
    assert checkpoint.meta["encoder"]["layers"] == 1
    assert sorted(checkpoint.params.tensors()) == sorted(result.params.tensors())


def test_labels_are_never_read(planted_dataset):
    h, x, labels = planted_dataset
    shuffled = LabelVector(labels.labels[::-1].copy(), labels.num_classes)
    runs = [train(h, x, given, tiny_config()) for given in (labels, shuffled, None)]
    for other in runs[1:]:
        assert other.losses() == runs[0].losses()
        for name, tensor in runs[0].params.tensors().items():
            assert np.array_equal(tensor, other.params.tensors()[name]), name
