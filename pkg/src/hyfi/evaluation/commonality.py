import csv
import warnings
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from attrs import define

from hyfi.logging.exceptions import HyfiWarning
from hyfi.objects.features import FeatureMatrix
from hyfi.objects.hypergraph import Hypergraph

__all__ = ["CommonalityPoint", "CommonalityCurve", "commonality_curve", "write_commonality_csv"]

COMMONALITY_CSV = "commonality.csv"
_PAIR_BLOCK = 65536


@define(frozen=True)
class CommonalityPoint:
    c: int
    mean_cosine: float
    pair_count: int


@define(frozen=True)
class CommonalityCurve:
    """Mean raw-feature cosine similarity per shared-hyperedge count."""

    points: Tuple[CommonalityPoint, ...]
    excluded_rows: Tuple[int, ...] = ()
    max_c: Optional[int] = None

    @property
    def total_pairs(self) -> int:
        return sum(point.pair_count for point in self.points)

    def at(self, c: int) -> Optional[CommonalityPoint]:
        return next((point for point in self.points if point.c == c), None)


def commonality_curve(
    h: Hypergraph, x: FeatureMatrix, max_c: Optional[int] = None
) -> CommonalityCurve:
    """Average cosine similarity of feature rows over all unordered node pairs
    sharing exactly c hyperedges, for every c present (up to `max_c`).

    Zero-norm feature rows have no cosine; pairs touching them are left out
    and the rows are reported in `excluded_rows`.
    """
    x.check_rows(h.num_nodes)
    if max_c is not None and max_c < 1:
        raise ValueError(f"max_c must be at least 1, got {max_c}")
    values = x.values
    norms = np.linalg.norm(values, axis=1)
    excluded = np.flatnonzero(norms == 0.0)
    if excluded.size:
        warnings.warn(
            f"{excluded.size} zero-norm feature row(s) excluded from the commonality"
            " analysis",
            HyfiWarning,
        )
    unit = values / np.where(norms == 0.0, 1.0, norms)[:, None]

    pairs = h.node_overlap.upper_triangle()
    rows, cols, counts = pairs.row, pairs.col, pairs.data.astype(np.int64)
    keep = (norms[rows] > 0.0) & (norms[cols] > 0.0)
    if max_c is not None:
        keep &= counts <= max_c
    rows, cols, counts = rows[keep], cols[keep], counts[keep]

    cosine = np.empty(rows.size)
    for start in range(0, rows.size, _PAIR_BLOCK):
        stop = start + _PAIR_BLOCK
        cosine[start:stop] = np.einsum(
            "ij,ij->i", unit[rows[start:stop]], unit[cols[start:stop]]
        )

    length = int(counts.max()) + 1 if counts.size else 1
    pair_count = np.bincount(counts, minlength=length)
    sums = np.bincount(counts, weights=cosine, minlength=length)
    points = tuple(
        CommonalityPoint(int(c), float(sums[c] / pair_count[c]), int(pair_count[c]))
        for c in np.flatnonzero(pair_count)
        if c >= 1
    )
    return CommonalityCurve(points, tuple(excluded.tolist()), max_c)


def write_commonality_csv(curve: CommonalityCurve, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("c", "mean_cosine", "pair_count"))
        for point in curve.points:
            writer.writerow((point.c, point.mean_cosine, point.pair_count))
    return path
