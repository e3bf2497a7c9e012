"""Undirected sparse graphs in compressed adjacency-list form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError


class SparseGraph:
    """Symmetric 0/1 adjacency stored as sorted per-node neighbor lists (CSR).

    Instances are immutable after construction and safe to share between
    concurrent readers. Build with :meth:`from_edges` unless the arrays are
    already symmetric, sorted and loop-free.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.degrees = np.diff(self.indptr)
        self._csr: sp.csr_matrix | None = None

    @classmethod
    def from_edges(cls, n: int, edges) -> "SparseGraph":
        """Build a graph on ``n`` nodes from an iterable of (u, v) pairs.

        Pairs are symmetrized and deduplicated; self-loops are rejected.
        """
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size == 0:
            return cls(np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))
        if e.min() < 0 or e.max() >= n:
            raise ValidationError(f"edge endpoint out of range [0, {n})")
        if (e[:, 0] == e[:, 1]).any():
            raise ValidationError("self-loops are not allowed")
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        # COO->CSR merges duplicate entries, which also deduplicates edges
        coo = sp.coo_matrix((np.ones(src.size, dtype=np.float64), (src, dst)),
                            shape=(n, n))
        adj = coo.tocsr()
        adj.sort_indices()
        return cls(adj.indptr.astype(np.int64), adj.indices.astype(np.int64))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def total_volume(self) -> int:
        """Sum of all degrees (= 2 * edge_count)."""
        return len(self.indices)

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of ``v`` (a read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def csr(self) -> sp.csr_matrix:
        """Adjacency as a scipy CSR matrix (cached)."""
        if self._csr is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            self._csr = sp.csr_matrix((data, self.indices, self.indptr),
                                      shape=(self.n, self.n))
        return self._csr

    def validate(self) -> None:
        """Check symmetry, sortedness and absence of loops. For tests."""
        n = self.n
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise ValidationError("inconsistent indptr")
        if (self.degrees < 0).any():
            raise ValidationError("indptr not monotone")
        for v in range(n):
            nbrs = self.neighbors(v)
            if nbrs.size and ((nbrs < 0).any() or (nbrs >= n).any()):
                raise ValidationError("neighbor id out of range")
            if (np.diff(nbrs) <= 0).any():
                raise ValidationError(f"neighbor list of {v} not strictly sorted")
            if (nbrs == v).any():
                raise ValidationError(f"self-loop at {v}")
        a = self.csr()
        if (a != a.T).nnz != 0:
            raise ValidationError("adjacency not symmetric")
        if int(self.degrees.sum()) != 2 * self.edge_count:
            raise ValidationError("degree sum does not match edge count")


@dataclass
class SubgraphStats:
    """Density and mean local clustering of an induced subgraph."""

    size: int
    density: float
    avg_clustering: float

    def to_dict(self) -> dict:
        return {"size": self.size, "density": self.density,
                "avg_clustering": self.avg_clustering}


def subgraph_stats(graph: SparseGraph, nodes: Iterable[int]) -> SubgraphStats:
    """Density and average local clustering coefficient of the induced subgraph.

    Nodes of induced degree < 2 contribute a clustering coefficient of 0.
    Density is 0 by convention for fewer than two nodes.
    """
    node_arr = np.unique(np.fromiter(nodes, dtype=np.int64))
    if node_arr.size and (node_arr.min() < 0 or node_arr.max() >= graph.n):
        raise ValidationError("subgraph node out of range")
    s = int(node_arr.size)
    member = np.zeros(graph.n, dtype=bool)
    member[node_arr] = True

    edges_inside = 0
    coeff_sum = 0.0
    for u in node_arr:
        nbrs = graph.neighbors(u)
        nb = nbrs[member[nbrs]]
        k = nb.size
        edges_inside += int((nb > u).sum())
        if k < 2:
            continue
        in_nb = np.zeros(graph.n, dtype=bool)
        in_nb[nb] = True
        links = 0
        for v in nb:
            links += int(in_nb[graph.neighbors(v)].sum())
        # links counts every edge among neighbors twice
        coeff_sum += links / (k * (k - 1))

    density = 2.0 * edges_inside / (s * (s - 1)) if s >= 2 else 0.0
    avg_clustering = coeff_sum / s if s > 0 else 0.0
    return SubgraphStats(size=s, density=density, avg_clustering=avg_clustering)
