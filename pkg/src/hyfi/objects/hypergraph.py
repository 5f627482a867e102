from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from attrs import define, field

from hyfi.logging.exceptions import InvalidHypergraphException

__all__ = [
    "Hypergraph",
    "OverlapLevel",
    "OverlapMatrix",
    "overlap_matrix",
    "shared_neighbors",
]


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _inverse_power(degree: np.ndarray, power: float) -> np.ndarray:
    """`degree ** -power`, with zero degrees mapped to zero instead of inf."""
    out = np.zeros(degree.shape, dtype=np.float64)
    nonzero = degree > 0
    out[nonzero] = degree[nonzero].astype(np.float64) ** (-power)
    return out


def _canonical_hyperedges(
    hyperedges: Iterable[Iterable[int]],
) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(sorted(int(v) for v in edge)) for edge in hyperedges)


class OverlapLevel(str, Enum):
    """Which side of the incidence structure an overlap matrix counts over."""

    NODE = "node"
    EDGE = "edge"


@define(frozen=True, slots=False)
class Hypergraph:
    """An immutable hypergraph G = (V, E) stored as membership lists.

    `hyperedges[j]` holds the ascending node ids of hyperedge j. The transpose
    (`node_memberships`), the degree vectors, the sparse incidence matrix and
    the overlap matrices are derived on first access and cached; the object
    never changes after construction. Hyperedge weights are the identity.
    """

    num_nodes: int = field(converter=int)
    hyperedges: Tuple[Tuple[int, ...], ...] = field(converter=_canonical_hyperedges)

    def __attrs_post_init__(self) -> None:
        if self.num_nodes < 0:
            raise InvalidHypergraphException(
                f"num_nodes must be non-negative, got {self.num_nodes}"
            )
        for j, edge in enumerate(self.hyperedges):
            if edge and (edge[0] < 0 or edge[-1] >= self.num_nodes):
                bad = edge[0] if edge[0] < 0 else edge[-1]
                raise InvalidHypergraphException(
                    f"node id out of range: hyperedge {j} references node {bad} but"
                    f" the hypergraph has {self.num_nodes} nodes"
                )
            if any(a == b for a, b in zip(edge, edge[1:])):
                raise InvalidHypergraphException(
                    f"hyperedge {j} lists the same node more than once"
                )

    @classmethod
    def from_memberships(
        cls,
        num_nodes: int,
        num_hyperedges: int,
        node_ids: Sequence[int],
        hyperedge_ids: Sequence[int],
    ) -> "Hypergraph":
        """Build from parallel (node, hyperedge) membership arrays.

        Hyperedges that receive no membership are kept as empty index slots so
        that the hyperedge count is preserved.
        """
        members: List[List[int]] = [[] for _ in range(num_hyperedges)]
        for v, e in zip(np.asarray(node_ids).tolist(), np.asarray(hyperedge_ids).tolist()):
            if not 0 <= e < num_hyperedges:
                raise InvalidHypergraphException(
                    f"hyperedge id out of range: {e} (of {num_hyperedges})"
                )
            members[e].append(v)
        return cls(num_nodes, members)

    @property
    def num_hyperedges(self) -> int:
        return len(self.hyperedges)

    @property
    def num_memberships(self) -> int:
        return int(self.hyperedge_degree.sum())

    @cached_property
    def node_memberships(self) -> Tuple[Tuple[int, ...], ...]:
        """Per-node ascending hyperedge ids: the transpose of `hyperedges`."""
        members: List[List[int]] = [[] for _ in range(self.num_nodes)]
        for j, edge in enumerate(self.hyperedges):
            for v in edge:
                members[v].append(j)
        return tuple(tuple(m) for m in members)

    @cached_property
    def node_degree(self) -> np.ndarray:
        """Diagonal of D_V."""
        degree = np.zeros(self.num_nodes, dtype=np.int64)
        for edge in self.hyperedges:
            degree[list(edge)] += 1
        return _freeze(degree)

    @cached_property
    def hyperedge_degree(self) -> np.ndarray:
        """Diagonal of D_E."""
        return _freeze(np.array([len(e) for e in self.hyperedges], dtype=np.int64))

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """The |V| x |E| incidence matrix H as a float64 CSR matrix."""
        rows = np.fromiter(
            (v for edge in self.hyperedges for v in edge),
            dtype=np.int64,
            count=self.num_memberships,
        )
        cols = np.repeat(np.arange(self.num_hyperedges), self.hyperedge_degree)
        data = np.ones(rows.shape[0], dtype=np.float64)
        matrix = sp.csr_matrix(
            (data, (rows, cols)), shape=(self.num_nodes, self.num_hyperedges)
        )
        matrix.sort_indices()
        return matrix

    @cached_property
    def inverse_sqrt_node_degree(self) -> np.ndarray:
        """Diagonal of D_V^{-1/2}; zero where the degree is zero."""
        return _freeze(_inverse_power(self.node_degree, 0.5))

    @cached_property
    def inverse_hyperedge_degree(self) -> np.ndarray:
        """Diagonal of D_E^{-1}; zero where the degree is zero."""
        return _freeze(_inverse_power(self.hyperedge_degree, 1.0))

    @cached_property
    def node_to_edge(self) -> sp.csr_matrix:
        """D_E^{-1} H^T D_V^{-1/2}, the |E| x |V| node-to-hyperedge operator."""
        operator = (
            sp.diags(self.inverse_hyperedge_degree)
            @ self.incidence.T
            @ sp.diags(self.inverse_sqrt_node_degree)
        )
        return sp.csr_matrix(operator)

    @cached_property
    def edge_to_node(self) -> sp.csr_matrix:
        """D_V^{-1/2} H, the |V| x |E| hyperedge-to-node operator (W = I)."""
        return sp.csr_matrix(sp.diags(self.inverse_sqrt_node_degree) @ self.incidence)

    @cached_property
    def node_overlap(self) -> "OverlapMatrix":
        return OverlapMatrix.from_incidence(self.incidence, OverlapLevel.NODE)

    @cached_property
    def edge_overlap(self) -> "OverlapMatrix":
        return OverlapMatrix.from_incidence(self.incidence, OverlapLevel.EDGE)

    def overlap(self, level: Union[OverlapLevel, str]) -> "OverlapMatrix":
        level = OverlapLevel(level)
        return self.node_overlap if level is OverlapLevel.NODE else self.edge_overlap

    def with_self_loops(self) -> "Hypergraph":
        """A copy with one singleton hyperedge per node appended after E."""
        loops = tuple((v,) for v in range(self.num_nodes))
        return Hypergraph(self.num_nodes, self.hyperedges + loops)

    def permute(
        self,
        node_permutation: Sequence[int],
        hyperedge_permutation: Optional[Sequence[int]] = None,
    ) -> "Hypergraph":
        """Relabel node i as `node_permutation[i]` and move hyperedge j to
        position `hyperedge_permutation[j]`."""
        node_map = np.asarray(node_permutation, dtype=np.int64)
        if sorted(node_map.tolist()) != list(range(self.num_nodes)):
            raise InvalidHypergraphException("node_permutation is not a permutation")
        relabeled = [tuple(int(node_map[v]) for v in edge) for edge in self.hyperedges]
        if hyperedge_permutation is None:
            return Hypergraph(self.num_nodes, relabeled)
        edge_map = np.asarray(hyperedge_permutation, dtype=np.int64)
        if sorted(edge_map.tolist()) != list(range(self.num_hyperedges)):
            raise InvalidHypergraphException(
                "hyperedge_permutation is not a permutation"
            )
        moved: List[Tuple[int, ...]] = [()] * self.num_hyperedges
        for j, edge in enumerate(relabeled):
            moved[int(edge_map[j])] = edge
        return Hypergraph(self.num_nodes, moved)

    def __repr__(self) -> str:
        return (
            f"Hypergraph(num_nodes: {self.num_nodes}, num_hyperedges:"
            f" {self.num_hyperedges}, memberships: {self.num_memberships})"
        )


@define(frozen=True, eq=False)
class OverlapMatrix:
    """Shared-group counts: H H^T (node level) or H^T H (edge level).

    Entry (i, j) is the number of hyperedges nodes i and j share (node level)
    or the number of nodes hyperedges i and j share (edge level); the diagonal
    holds the degrees. Stored as a symmetric int64 CSR matrix with sorted
    indices.
    """

    counts: sp.csr_matrix
    level: OverlapLevel

    @classmethod
    def from_incidence(
        cls, incidence: sp.spmatrix, level: Union[OverlapLevel, str]
    ) -> "OverlapMatrix":
        level = OverlapLevel(level)
        h = sp.csr_matrix(incidence, dtype=np.int64)
        product = h @ h.T if level is OverlapLevel.NODE else h.T @ h
        counts = sp.csr_matrix(product, dtype=np.int64)
        counts.eliminate_zeros()
        counts.sort_indices()
        return cls(counts, level)

    @property
    def size(self) -> int:
        return self.counts.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.counts.diagonal(), dtype=np.int64)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        self._check_index(i)
        self._check_index(j)
        return int(self.counts[i, j])

    def row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """Column ids and counts of the stored entries of row i (diagonal included)."""
        self._check_index(i)
        start, stop = self.counts.indptr[i], self.counts.indptr[i + 1]
        return self.counts.indices[start:stop], self.counts.data[start:stop]

    def pairs(self, include_diagonal: bool = False) -> Iterator[Tuple[int, int, int]]:
        """Iterate (i, j, count) over the upper triangle without densifying."""
        for i in range(self.size):
            columns, values = self.row(i)
            for j, count in zip(columns.tolist(), values.tolist()):
                if j > i or (include_diagonal and j == i):
                    yield i, j, count

    def upper_triangle(self) -> sp.coo_matrix:
        """The strictly upper triangular entries as a COO matrix."""
        return sp.triu(self.counts, k=1, format="coo")

    def off_diagonal(self) -> sp.csr_matrix:
        matrix = self.counts.tolil()
        matrix.setdiag(0)
        matrix = matrix.tocsr()
        matrix.eliminate_zeros()
        matrix.sort_indices()
        return matrix

    def shared_neighbors(self, i: int) -> List[Tuple[int, int]]:
        columns, values = self.row(i)
        return [
            (j, c) for j, c in zip(columns.tolist(), values.tolist()) if j != i and c > 0
        ]

    def to_dense(self) -> np.ndarray:
        return self.counts.toarray()

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.size:
            raise IndexError(
                f"{self.level.value} id {i} out of range for an overlap matrix of"
                f" size {self.size}"
            )

    def __repr__(self) -> str:
        return (
            f"OverlapMatrix(level: {self.level.value}, size: {self.size}, nnz:"
            f" {self.counts.nnz})"
        )


def overlap_matrix(h: Hypergraph, level: Union[OverlapLevel, str]) -> OverlapMatrix:
    """The node-level (H H^T) or edge-level (H^T H) overlap of `h`, cached on `h`."""
    return h.overlap(level)


def shared_neighbors(om: OverlapMatrix, i: int) -> List[Tuple[int, int]]:
    """All (j, count) with j != i and a positive overlap: the weak-positive
    candidates of anchor i."""
    return om.shared_neighbors(i)
