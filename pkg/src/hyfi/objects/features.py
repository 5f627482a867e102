from typing import Optional

import numpy as np
from attrs import define, field

from hyfi.logging.exceptions import DimensionMismatchException, HyfiException

__all__ = ["FeatureMatrix", "LabelVector"]


def _as_matrix(values) -> np.ndarray:
    matrix = np.array(values, dtype=np.float64, copy=True)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise DimensionMismatchException(
            f"features must be a 2-d matrix, got {matrix.ndim} dimensions"
        )
    matrix.setflags(write=False)
    return matrix


def _as_labels(values) -> np.ndarray:
    labels = np.array(values, dtype=np.int64, copy=True).reshape(-1)
    labels.setflags(write=False)
    return labels


@define(frozen=True, eq=False)
class FeatureMatrix:
    """Dense |V| x d node features (X). Immutable; all entries finite."""

    values: np.ndarray = field(converter=_as_matrix)

    def __attrs_post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            bad = np.argwhere(~np.isfinite(self.values))[0].tolist()
            raise HyfiException(f"feature matrix holds a non-finite entry at {bad}")

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.values.shape[1]

    @property
    def min_value(self) -> float:
        return float(self.values.min()) if self.values.size else 0.0

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    @property
    def in_unit_range(self) -> bool:
        return 0.0 <= self.min_value and self.max_value <= 1.0

    def check_rows(self, num_nodes: int) -> None:
        if self.num_rows != num_nodes:
            raise DimensionMismatchException(
                f"feature matrix has {self.num_rows} rows but the hypergraph has"
                f" {num_nodes} nodes"
            )

    def __repr__(self) -> str:
        return f"FeatureMatrix(rows: {self.num_rows}, feature_dim: {self.feature_dim})"


@define(frozen=True, eq=False)
class LabelVector:
    """Integer class labels, one per node, each in [0, num_classes)."""

    labels: np.ndarray = field(converter=_as_labels)
    num_classes: Optional[int] = None

    def __attrs_post_init__(self) -> None:
        if self.num_classes is None:
            inferred = int(self.labels.max()) + 1 if self.labels.size else 0
            object.__setattr__(self, "num_classes", inferred)
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= self.num_classes
        ):
            raise HyfiException(
                f"labels must lie in [0, {self.num_classes}), found"
                f" [{int(self.labels.min())}, {int(self.labels.max())}]"
            )

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __repr__(self) -> str:
        return f"LabelVector(size: {len(self)}, num_classes: {self.num_classes})"
