import numpy as np
import scipy.sparse as sp
from attrs import define

from hyfi.logging.exceptions import WeakWeightException
from hyfi.objects.hypergraph import OverlapLevel, OverlapMatrix

__all__ = ["WeakWeights", "weak_weights"]


@define(frozen=True, eq=False)
class WeakWeights:
    """Row-anchored weak-positive weights w_ij for every pair sharing a group.

    The sparsity pattern is the off-diagonal of the overlap matrix the weights
    were built from. Rows are not symmetric: w_ij is normalised by C_ii.
    """

    matrix: sp.csr_matrix
    level: OverlapLevel

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, index) -> float:
        i, j = index
        return float(self.matrix[i, j])

    def unweighted(self) -> "WeakWeights":
        """Same sharing pattern with every weight set to 1."""
        ones = self.matrix.copy()
        ones.data = np.ones_like(ones.data)
        return WeakWeights(ones, self.level)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def weak_weights(om: OverlapMatrix) -> WeakWeights:
    """w_ij = C_ij * (C_ij / C_ii): the shared-group count scaled by the share of
    the anchor's own groups that j is part of."""
    off = om.off_diagonal()
    diagonal = om.diagonal().astype(np.float64)
    rows = np.repeat(np.arange(om.size), np.diff(off.indptr))
    if rows.size and np.any(diagonal[rows] <= 0):
        bad = sorted(set(rows[diagonal[rows] <= 0].tolist()))
        raise WeakWeightException(
            f"{om.level.value} overlap has a zero diagonal with nonzero off-diagonal"
            f" entries in row(s) {bad[:10]}; the overlap matrix is corrupt"
        )
    counts = off.data.astype(np.float64)
    data = counts * counts / diagonal[rows]
    matrix = sp.csr_matrix(
        (data, off.indices.copy(), off.indptr.copy()), shape=off.shape
    )
    return WeakWeights(matrix, om.level)
