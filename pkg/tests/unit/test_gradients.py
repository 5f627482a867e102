"""Central finite differences against the hand-derived backward pass."""
import numpy as np
import pytest

from hyfi.augmentation import AugmentationSpec, generate_views
from hyfi.loss import LossConfig
from hyfi.objects import FeatureMatrix, Hypergraph
from hyfi.training import (
    EncoderConfig,
    ObjectiveContext,
    TrainConfig,
    backward,
    forward_loss,
    initial_parameters,
)
from tests.conftest import make_random_hypergraph

STEP = 1e-5
TOLERANCE = 1e-5

# every node and every hyperedge has a group partner
COVERING = Hypergraph(6, [[0, 1, 2], [2, 3, 4], [4, 5, 0], [1, 3, 5]])


def _config(**overrides) -> TrainConfig:
    fields = {
        "encoder": EncoderConfig(hidden_dim=4, proj_dim=3, activation="elu"),
        "augmentation": AugmentationSpec(kind="gaussian", sigma=0.2, num_views=2),
        "master_seed": 5,
    }
    fields.update(overrides)
    return TrainConfig(**fields)


def _numeric_gradient(fn, tensors):
    numeric = {}
    for name, tensor in tensors.items():
        grad = np.zeros_like(tensor)
        for index in np.ndindex(tensor.shape):
            original = tensor[index]
            tensor[index] = original + STEP
            plus = fn()
            tensor[index] = original - STEP
            minus = fn()
            tensor[index] = original
            grad[index] = (plus - minus) / (2 * STEP)
        numeric[name] = grad
    return numeric


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-3)
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(h: Hypergraph, cfg: TrainConfig, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    x = FeatureMatrix(rng.random((h.num_nodes, 3)))
    params = initial_parameters(x.feature_dim, cfg)
    for tensor in params.tensors().values():
        if tensor.ndim == 1 and tensor.size > 1:
            tensor[:] = rng.normal(scale=0.3, size=tensor.shape)
    views = generate_views(h, x, cfg.view_spec(), epoch=1)
    ctx = ObjectiveContext.build(h, cfg.encoder.self_loops)

    _, grads = backward(h, x, views, params, cfg, ctx=ctx)
    numeric = _numeric_gradient(
        lambda: forward_loss(h, x, views, params, cfg, ctx=ctx).total,
        params.tensors(),
    )
    assert set(numeric) == set(grads.tensors)
    for name, expected in numeric.items():
        error = _relative_error(grads[name], expected)
        assert error < TOLERANCE, f"{name}: relative error {error:.2e}"


@pytest.mark.parametrize(
    "overrides",
    [
        {},
        {"encoder": EncoderConfig(hidden_dim=4, proj_dim=3, layers=2, activation="elu")},
        {"encoder": EncoderConfig(hidden_dim=4, proj_dim=3, activation="elu", self_loops=False)},
        {"loss": LossConfig(use_weak_positive=False)},
        {"loss": LossConfig(use_weak_weight=False)},
        {"loss": LossConfig(use_positive=False)},
        {"loss": LossConfig(use_edge_loss=False)},
        {"loss": LossConfig(alpha=0.5, tau_node=0.3, tau_edge=0.8)},
        {"loss_chunk_size": 3},
        {"augmentation": AugmentationSpec(kind="uniform", sigma=0.3, num_views=3)},
        {"augmentation": AugmentationSpec(kind="drop_incidence", drop_rate=0.3)},
        {"augmentation": AugmentationSpec(kind="drop_node", drop_rate=0.3)},
        {"augmentation": AugmentationSpec(kind="drop_hyperedge", drop_rate=0.4)},
    ],
)
def test_gradients_on_a_covering_graph(overrides):
    check_gradients(COVERING, _config(**overrides))


def test_gradients_on_a_random_graph():
    h = make_random_hypergraph(np.random.default_rng(31), 9, 5)
    check_gradients(h, _config(), seed=1)


def test_gradients_with_prelu():
    cfg = _config(encoder=EncoderConfig(hidden_dim=4, proj_dim=3, activation="prelu"))
    check_gradients(COVERING, cfg, seed=2)


KINDS = ["gaussian", "uniform", "bernoulli", "drop_incidence", "drop_node", "drop_hyperedge"]


@pytest.mark.parametrize("seed", range(50))
def test_gradients_on_small_random_graphs(seed):
    rng = np.random.default_rng(1000 + seed)
    num_nodes = int(rng.integers(2, 13))
    num_hyperedges = int(rng.integers(1, 9))
    # odd seeds may leave nodes without any hyperedge
    h = make_random_hypergraph(rng, num_nodes, num_hyperedges, cover=seed % 2 == 0)
    kind = KINDS[seed % len(KINDS)]
    augmentation = AugmentationSpec(kind=kind, sigma=0.2, flip_prob=0.3, drop_rate=0.4)
    check_gradients(h, _config(augmentation=augmentation), seed=seed)
