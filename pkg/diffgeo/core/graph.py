"""
Graph core for DiffGeo
Directed weighted graphs with row-stochastic transition weights in CSR layout,
validation, normalization and reachability checks
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import (
    DimensionMismatch, DuplicateEdge, EmptyRow, IndexOutOfRange, InvalidInputError,
    NonPositiveWeight, SizeTooSmall
)

logger = logging.getLogger(__name__)

# Rows already within this distance of 1 are stored as given
ROW_SUM_TOL = 1e-12

Edge = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable row-stochastic digraph; absorbing vertices are stored as empty rows"""
    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    weights: np.ndarray
    absorbing: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def nnz(self) -> int:
        return int(self.col_indices.shape[0])

    @property
    def has_absorbing(self) -> bool:
        return bool(self.absorbing)

    @cached_property
    def interior(self) -> np.ndarray:
        """Sorted ids of non-absorbing vertices"""
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.absorbing)] = False
        return np.flatnonzero(mask)

    @cached_property
    def transition_matrix(self) -> sparse.csr_matrix:
        """P as a scipy CSR matrix sharing the canonical arrays"""
        return sparse.csr_matrix(
            (self.weights, self.col_indices, self.row_offsets), shape=(self.n, self.n)
        )

    def row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """Destination ids and weights of row i"""
        start, end = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[start:end], self.weights[start:end]

    def interior_block(self) -> Tuple[sparse.csr_matrix, np.ndarray]:
        """Substochastic block of P restricted to interior rows and columns"""
        idx = self.interior
        return self.transition_matrix[idx][:, idx].tocsr(), idx

    def edges(self) -> Iterable[Edge]:
        for i in range(self.n):
            cols, weights = self.row(i)
            for j, w in zip(cols, weights):
                yield int(i), int(j), float(w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.absorbing == other.absorbing
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.nnz, self.absorbing))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, nnz={self.nnz}, absorbing={sorted(self.absorbing)})"


class GershgorinRows(NamedTuple):
    """Per-vertex diagonal entry 1 - p_ii of L and absolute off-diagonal row sum"""
    diagonal: np.ndarray
    off_diagonal: np.ndarray


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=float)
    if arr.size == 0:
        return np.empty((0, 3), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidInputError("Edges must be (src, dst, weight) triples")
    return arr


def build_graph(n: int, edges: Sequence[Edge], absorbing: Iterable[int] = ()) -> Graph:
    """
    Build a canonical CSR graph.

    Rows of non-absorbing vertices are normalized to sum 1; edges leaving an
    absorbing vertex are dropped so that vertex becomes a sink.
    """
    if int(n) != n or n < 1:
        raise SizeTooSmall(f"Vertex count must be a positive integer, got {n}")
    n = int(n)

    arr = _as_edge_array(edges)
    src_f, dst_f, w = arr[:, 0], arr[:, 1], arr[:, 2]

    if np.any(src_f != np.round(src_f)) or np.any(dst_f != np.round(dst_f)):
        raise IndexOutOfRange("Vertex ids must be integers")
    src = src_f.astype(np.int64)
    dst = dst_f.astype(np.int64)

    bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise IndexOutOfRange(f"Edge ({src[k]}, {dst[k]}) outside 0..{n - 1}")

    nonpos = ~(w > 0) | ~np.isfinite(w)
    if np.any(nonpos):
        k = int(np.flatnonzero(nonpos)[0])
        raise NonPositiveWeight(f"Edge ({src[k]}, {dst[k]}) has weight {w[k]}")

    absorbing_set = frozenset(int(a) for a in absorbing)
    for a in absorbing_set:
        if not 0 <= a < n:
            raise IndexOutOfRange(f"Absorbing vertex {a} outside 0..{n - 1}")

    order = np.lexsort((dst, src))
    src, dst, w = src[order], dst[order], w[order]

    dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
    if np.any(dup):
        k = int(np.flatnonzero(dup)[0])
        raise DuplicateEdge(f"Duplicate edge ({src[k]}, {dst[k]})")

    if absorbing_set:
        keep = ~np.isin(src, np.fromiter(absorbing_set, dtype=np.int64))
        src, dst, w = src[keep], dst[keep], w[keep]

    counts = np.bincount(src, minlength=n)
    for i in np.flatnonzero(counts == 0):
        if int(i) not in absorbing_set:
            raise EmptyRow(f"Vertex {i} has no outgoing edges and is not absorbing")

    row_sums = np.bincount(src, weights=w, minlength=n)
    needs_norm = np.abs(row_sums - 1.0) > ROW_SUM_TOL
    if np.any(needs_norm[src]):
        scale = np.where(needs_norm, row_sums, 1.0)
        w = np.where(needs_norm[src], w / scale[src], w)

    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])

    graph = Graph(
        n=n,
        row_offsets=row_offsets,
        col_indices=dst.copy(),
        weights=w.astype(np.float64, copy=True),
        absorbing=absorbing_set
    )
    logger.debug(f"Built {graph}")
    return graph


def decompose(g: Graph) -> Tuple[int, List[Edge], Tuple[int, ...]]:
    """Inverse of build_graph: (n, edges, absorbing)"""
    return g.n, list(g.edges()), tuple(sorted(g.absorbing))


def check_reachability(g: Graph) -> bool:
    """
    Strong connectivity on the support of P when there is no absorbing set;
    otherwise every vertex must reach an absorbing vertex.
    """
    P = g.transition_matrix
    if not g.has_absorbing:
        n_components, _ = csgraph.connected_components(P, directed=True, connection='strong')
        return n_components == 1

    reverse = P.T.tocsr()
    reached = np.zeros(g.n, dtype=bool)
    for a in sorted(g.absorbing):
        if reached[a]:
            continue
        order = csgraph.breadth_first_order(reverse, a, directed=True, return_predecessors=False)
        reached[order] = True
        if reached.all():
            return True
    return bool(reached.all())


def laplacian_row_sums(g: Graph) -> GershgorinRows:
    """Diagonal 1 - p_ii and off-diagonal absolute row sums of L"""
    P = g.transition_matrix
    self_loops = P.diagonal()
    totals = np.asarray(P.sum(axis=1)).ravel()
    diagonal = np.where(totals > 0, 1.0 - self_loops, 0.0)
    off_diagonal = totals - self_loops
    return GershgorinRows(diagonal=diagonal, off_diagonal=off_diagonal)


def as_vector(values, n: int, name: str = 'u') -> np.ndarray:
    """Validate a per-vertex real vector"""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != n:
        raise DimensionMismatch(f"{name} has shape {vec.shape}, expected ({n},)")
    if not np.all(np.isfinite(vec)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return vec


def as_vertex_set(vertices: Iterable[int], n: int, name: str = 'B') -> FrozenSet[int]:
    """Validate a vertex set against the vertex range"""
    result = frozenset(int(v) for v in vertices)
    for v in result:
        if not 0 <= v < n:
            raise IndexOutOfRange(f"{name} contains vertex {v} outside 0..{n - 1}")
    return result


def mask_of(vertices: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    ids = list(vertices)
    if ids:
        mask[ids] = True
    return mask


def graph_summary(g: Graph, reachable: Optional[bool] = None) -> dict:
    """Small dictionary describing a graph for reports"""
    return {
        'n': g.n,
        'nnz': g.nnz,
        'absorbing': sorted(int(a) for a in g.absorbing),
        'self_loops': int(np.count_nonzero(g.transition_matrix.diagonal())),
        'reachable': check_reachability(g) if reachable is None else reachable
    }
