import math
from typing import List

import numpy as np
from attrs import define
from pydantic import Field, model_validator

from hyfi.core.helpers.random import SEED_LIMIT, stream
from hyfi.core.models import HyfiModel
from hyfi.logging.exceptions import SplitException

__all__ = ["MIN_SPLIT_NODES", "Split", "SplitSpec", "make_splits", "split_sizes"]

MIN_SPLIT_NODES = 10


class SplitSpec(HyfiModel):
    """Random train / valid / test partitions and classifier restarts per split."""

    train_frac: float = Field(default=0.10, gt=0.0, lt=1.0)
    valid_frac: float = Field(default=0.10, gt=0.0, lt=1.0)
    test_frac: float = Field(default=0.80, gt=0.0, lt=1.0)
    num_splits: int = Field(default=20, ge=1)
    num_inits: int = Field(default=5, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)

    @model_validator(mode="after")
    def _fractions_sum_to_one(self) -> "SplitSpec":
        total = self.train_frac + self.valid_frac + self.test_frac
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {total}")
        return self


@define(frozen=True, eq=False)
class Split:
    index: int
    train: np.ndarray
    valid: np.ndarray
    test: np.ndarray


def split_sizes(n: int, spec: SplitSpec) -> tuple:
    """Train and valid take floor(frac * n) each; test takes the remainder."""
    if n < MIN_SPLIT_NODES:
        raise SplitException(
            f"need at least {MIN_SPLIT_NODES} nodes to split, got {n}"
        )
    # the epsilon keeps 0.1 * 30 style products from rounding down
    n_train = int(math.floor(spec.train_frac * n + 1e-9))
    n_valid = int(math.floor(spec.valid_frac * n + 1e-9))
    n_test = n - n_train - n_valid
    if min(n_train, n_valid, n_test) < 1:
        raise SplitException(
            f"{n} nodes leave an empty part: sizes ({n_train}, {n_valid}, {n_test})"
        )
    return n_train, n_valid, n_test


def make_splits(n: int, spec: SplitSpec) -> List[Split]:
    n_train, n_valid, _ = split_sizes(n, spec)
    splits = []
    for index in range(spec.num_splits):
        order = stream(spec.seed, "splits", index).permutation(n)
        splits.append(
            Split(
                index=index,
                train=np.sort(order[:n_train]),
                valid=np.sort(order[n_train : n_train + n_valid]),
                test=np.sort(order[n_train + n_valid :]),
            )
        )
    return splits
