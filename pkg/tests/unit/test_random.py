import numpy as np
import pytest

from hyfi.core.helpers.random import child_seed, spawn_key, stream


def test_same_path_same_stream():
    first = stream(7, "augmentation", 3, 1).random(5)
    second = stream(7, "augmentation", 3, 1).random(5)
    assert np.array_equal(first, second)


@pytest.mark.parametrize(
    "other",
    [
        (8, "augmentation", 3, 1),
        (7, "augmentation", 3, 0),
        (7, "augmentation", 4, 1),
        (7, "splits", 3, 1),
    ],
)
def test_different_paths_differ(other):
    base = stream(7, "augmentation", 3, 1).random(5)
    assert not np.array_equal(base, stream(*other).random(5))


def test_text_labels_never_collide_with_integers():
    assert spawn_key("init")[0] >= 2**63
    assert spawn_key(5) == (5,)


def test_child_seed_is_stable():
    assert child_seed(1, "eval-init", 0, 0) == child_seed(1, "eval-init", 0, 0)
    assert child_seed(1, "eval-init", 0, 0) != child_seed(1, "eval-init", 0, 1)
    assert 0 <= child_seed(1, "x") < 2**64


def test_largest_seed_has_its_own_stream():
    assert stream(2**64 - 1, "init").random() != stream(0, "init").random()


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seeds_outside_64_bits_are_rejected(seed):
    with pytest.raises(ValueError, match="seed must be in"):
        stream(seed, "init")
    with pytest.raises(ValueError, match="seed must be in"):
        child_seed(seed, "init")


@pytest.mark.parametrize("label, error", [(True, TypeError), (-1, ValueError)])
def test_rejected_labels(label, error):
    with pytest.raises(error):
        stream(0, label)
