"""Undirected simple graph with the structural primitives used downstream.

Graphs are immutable after construction: node count ``n`` plus a CSR layout
(``indptr``, ``indices``) whose neighbor lists are sorted ascending, so
iteration order never depends on construction order.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order


class Graph:
    """Undirected simple graph (no self-loops, no duplicate edges).

    Parameters
    ----------
    n : int
        Node count; node ids are 0..n-1.
    indptr, indices : ndarray
        CSR neighbor-list layout; ``indices[indptr[i]:indptr[i+1]]`` holds
        the sorted neighbors of node ``i``. Assumed symmetric and clean;
        use :func:`from_edge_list` to build from raw pairs.
    """

    __slots__ = ("n", "indptr", "indices", "_csr")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self._csr = None

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        """Degree vector d, d[i] = |adj(i)|."""
        return np.diff(self.indptr)

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with i < j, lexicographically sorted."""
        row = np.repeat(np.arange(self.n), np.diff(self.indptr))
        col = self.indices
        keep = row < col
        return np.column_stack([row[keep], col[keep]])

    def as_csr(self) -> sp.csr_matrix:
        """0/1 adjacency as a scipy CSR matrix (cached; treat as read-only)."""
        if self._csr is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            self._csr = sp.csr_matrix(
                (data, self.indices.astype(np.int32), self.indptr), shape=(self.n, self.n)
            )
        return self._csr

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return k < len(nb) and nb[k] == j

    def __getstate__(self):
        # the cached scipy matrix is rebuilt on demand; do not pickle it
        return (self.n, self.indptr, self.indices)

    def __setstate__(self, state):
        self.n, self.indptr, self.indices = state
        self._csr = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def from_edge_list(n: int, edges) -> Graph:
    """Build a Graph from (i, j) pairs; duplicates collapse, order is irrelevant.

    Raises
    ------
    ValueError
        On an out-of-range endpoint or a self-loop.
    """
    if n < 0:
        raise ValueError(f"node count must be nonnegative, got {n}")
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if arr.size:
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if (arr[:, 0] == arr[:, 1]).any():
            bad = arr[arr[:, 0] == arr[:, 1]][0, 0]
            raise ValueError(f"self-loop at node {bad}")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    pair_ids = np.unique(lo * n + hi)
    lo, hi = pair_ids // n, pair_ids % n
    return _from_sorted_pairs(n, lo, hi)


def _from_sorted_pairs(n: int, lo: np.ndarray, hi: np.ndarray) -> Graph:
    """CSR from deduplicated i<j pairs (both directions materialized)."""
    row = np.concatenate([lo, hi])
    col = np.concatenate([hi, lo])
    order = np.lexsort((col, row))
    row, col = row[order], col[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, row + 1, 1)
    np.cumsum(indptr, out=indptr)
    return Graph(n, indptr, col)


def degrees(g: Graph) -> np.ndarray:
    return g.degrees()


def is_connected(g: Graph) -> bool:
    """True iff a single BFS from node 0 reaches all nodes."""
    if g.n < 1:
        raise ValueError("empty graph")
    if g.n == 1:
        return True
    order = breadth_first_order(g.as_csr(), 0, directed=False, return_predecessors=False)
    return len(order) == g.n


def check_permutation(pi, n: int) -> np.ndarray:
    """Validate that pi is a bijection on [0, n) and return it as an array."""
    pi = np.asarray(pi, dtype=np.int64)
    if pi.shape != (n,):
        raise ValueError(f"permutation length {pi.shape} does not match n={n}")
    seen = np.zeros(n, dtype=bool)
    if pi.min(initial=0) < 0 or pi.max(initial=-1) >= n:
        raise ValueError("permutation entry out of range")
    seen[pi] = True
    if not seen.all():
        raise ValueError("permutation is not a bijection")
    return pi


def permute(g: Graph, pi) -> Graph:
    """Relabel nodes: edge (i, j) maps to (pi[i], pi[j])."""
    pi = check_permutation(pi, g.n)
    e = g.edges()
    if len(e) == 0:
        return from_edge_list(g.n, [])
    mapped = pi[e]
    lo = np.minimum(mapped[:, 0], mapped[:, 1])
    hi = np.maximum(mapped[:, 0], mapped[:, 1])
    order = np.lexsort((hi, lo))
    return _from_sorted_pairs(g.n, lo[order], hi[order])


def pagerank(
    g: Graph, damping: float = 0.85, tol: float = 1e-12, max_iter: int = 1000
) -> np.ndarray:
    """PageRank by power iteration on the degree-normalized walk.

    Requires min degree >= 1 (no dangling-node handling). Stops when the L1
    change between iterates is <= tol; raises if max_iter is exhausted first.
    """
    deg = g.degrees().astype(np.float64)
    if g.n == 0:
        raise ValueError("empty graph")
    if deg.min() < 1:
        raise ValueError("pagerank requires every node to have degree >= 1")
    a = g.as_csr()
    x = np.full(g.n, 1.0 / g.n)
    teleport = (1.0 - damping) / g.n
    for _ in range(max_iter):
        # W^T x = A (x / d) since A is symmetric
        x_new = teleport + damping * a.dot(x / deg)
        if np.abs(x_new - x).sum() <= tol:
            return x_new
        x = x_new
    raise RuntimeError(f"pagerank did not converge within {max_iter} iterations")


def triangle_counts(g: Graph) -> np.ndarray:
    """Per-node triangle count tri(i) = number of edges among neighbors of i."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    a = g.as_csr()
    density = len(g.indices) / max(g.n * g.n, 1)
    if density > 0.1:
        ad = a.toarray()
        tri = ((ad @ ad) * ad).sum(axis=1) / 2.0
    else:
        tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    return np.round(tri).astype(np.int64)


def clustering_coefficients(g: Graph) -> np.ndarray:
    """c_i = 2 tri(i) / (d_i (d_i - 1)) for d_i >= 2, else 0."""
    deg = g.degrees().astype(np.float64)
    tri = triangle_counts(g).astype(np.float64)
    out = np.zeros(g.n)
    mask = deg >= 2
    out[mask] = 2.0 * tri[mask] / (deg[mask] * (deg[mask] - 1.0))
    return out


def write_edge_list(g: Graph, path) -> None:
    """Text format: first line "n m", then m lines "i j" (0-based, i < j)."""
    e = g.edges()
    with open(path, "w") as fh:
        fh.write(f"{g.n} {len(e)}\n")
        for i, j in e:
            fh.write(f"{i} {j}\n")


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j'")
            edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise ValueError(f"{path}: header says {m} edges, found {len(edges)}")
    return from_edge_list(n, edges)
