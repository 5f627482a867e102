"""
Labeled, splittable random streams.

Every random draw in `hyfi` comes from a generator derived from the master seed
and a path of labels, e.g. ``stream(seed, "augmentation", epoch, view)``. Two
different paths never share a stream, and the same path always reproduces the
same stream.
"""
import hashlib
from typing import Tuple, Union

import numpy as np

Label = Union[str, int]

# seeds are unsigned 64-bit integers
SEED_LIMIT = 1 << 64


def _entropy(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def _label_key(label: Label) -> int:
    if isinstance(label, (bool, np.bool_)):
        raise TypeError("boolean stream labels are ambiguous")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"stream labels must be non-negative, got {label}")
        return int(label)
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    # offset into the upper half so text labels never collide with small ints
    return int.from_bytes(digest[:8], "little") | (1 << 63)


def spawn_key(*path: Label) -> Tuple[int, ...]:
    return tuple(_label_key(label) for label in path)


def stream(seed: int, *path: Label) -> np.random.Generator:
    """A PCG64 generator for the labeled child stream `path` of `seed`."""
    sequence = np.random.SeedSequence(entropy=_entropy(seed), spawn_key=spawn_key(*path))
    return np.random.Generator(np.random.PCG64(sequence))


def child_seed(seed: int, *path: Label) -> int:
    """A 64-bit integer seed for the labeled child stream `path` of `seed`."""
    sequence = np.random.SeedSequence(entropy=_entropy(seed), spawn_key=spawn_key(*path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
