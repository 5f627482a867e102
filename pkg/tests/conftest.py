from typing import Callable

import numpy as np
import pytest

from hyfi.datasets.loader import save_hypergraph
from hyfi.objects.features import FeatureMatrix, LabelVector
from hyfi.objects.hypergraph import Hypergraph


def make_random_hypergraph(
    rng: np.random.Generator,
    num_nodes: int,
    num_hyperedges: int,
    max_size: int = 4,
    cover: bool = True,
) -> Hypergraph:
    """Random non-empty hyperedges; with `cover` every node gets a membership."""
    hyperedges = []
    for _ in range(num_hyperedges):
        size = int(rng.integers(1, min(max_size, num_nodes) + 1))
        hyperedges.append(set(rng.choice(num_nodes, size=size, replace=False).tolist()))
    if cover:
        for v in range(num_nodes):
            if not any(v in edge for edge in hyperedges):
                hyperedges[int(rng.integers(num_hyperedges))].add(v)
    return Hypergraph(num_nodes, [sorted(edge) for edge in hyperedges])


def make_planted_dataset(
    rng: np.random.Generator,
    num_nodes: int = 100,
    num_classes: int = 2,
    num_hyperedges: int = 40,
    feature_dim: int = 6,
):
    """Hyperedges drawn mostly within a class; binary features near a class
    prototype."""
    labels = np.arange(num_nodes) % num_classes
    members = [np.flatnonzero(labels == k) for k in range(num_classes)]
    hyperedges = []
    for j in range(num_hyperedges):
        if j % 8 == 7:
            pool = np.arange(num_nodes)
        else:
            pool = members[j % num_classes]
        size = int(rng.integers(2, 6))
        hyperedges.append(sorted(rng.choice(pool, size=size, replace=False).tolist()))
    covered = {v for edge in hyperedges for v in edge}
    for v in range(num_nodes):
        if v not in covered:
            hyperedges.append(
                sorted({v, int(rng.choice(members[labels[v]][members[labels[v]] != v]))})
            )
    prototypes = rng.integers(0, 2, size=(num_classes, feature_dim))
    flips = rng.random((num_nodes, feature_dim)) < 0.1
    features = np.abs(prototypes[labels] - flips).astype(np.float64)
    # no all-zero feature rows
    features[:, 0] = 1.0
    return (
        Hypergraph(num_nodes, hyperedges),
        FeatureMatrix(features),
        LabelVector(labels, num_classes),
    )


@pytest.fixture()
def toy_hypergraph() -> Hypergraph:
    # H = [[1, 1], [1, 0], [0, 1]]
    return Hypergraph(3, [[0, 1], [0, 2]])


@pytest.fixture()
def random_hypergraph() -> Callable[..., Hypergraph]:
    return make_random_hypergraph


@pytest.fixture(scope="session")
def planted_dataset():
    return make_planted_dataset(np.random.default_rng(2024))


@pytest.fixture()
def dataset_dir(tmp_path, planted_dataset):
    h, x, labels = planted_dataset
    return save_hypergraph(tmp_path / "planted", h, x, labels)
