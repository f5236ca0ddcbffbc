"""26-value topological feature vector used as the comparison baseline.

Feature order (each 4-stat block is max, min, mean, population std over
nodes): degree centrality (1-4), betweenness (5-8), closeness (9-12),
clustering coefficient (13-16), diameter (17), radius (18), per-node
triangle count (19-22), per-node average shortest path length (23-26).
"""

from __future__ import annotations

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator, TransformerMixin

from .graph import Graph, clustering_coefficients, triangle_counts
from .parallel import parallel_map

TOPO_DIM = 26


@njit(cache=True)
def _brandes_all_sources(indptr, indices, n):
    """Betweenness (Brandes), per-node distance sums, and eccentricities.

    Returns (betweenness_raw, sum_dist, ecc, connected); betweenness_raw
    counts ordered (s, t) pairs and is halved/normalized by the caller.
    """
    bc = np.zeros(n)
    sum_dist = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        for v in range(n):
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        head = 0
        tail = 1
        order[0] = s
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for ptr in range(indptr[v], indptr[v + 1]):
                w = indices[ptr]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        if tail < n:
            return bc, sum_dist, ecc, False
        total = 0
        emax = 0
        for v in range(n):
            total += dist[v]
            if dist[v] > emax:
                emax = dist[v]
        sum_dist[s] = total
        ecc[s] = emax
        for pos in range(tail - 1, 0, -1):
            w = order[pos]
            dw = dist[w]
            coeff = (1.0 + delta[w]) / sigma[w]
            for ptr in range(indptr[w], indptr[w + 1]):
                v = indices[ptr]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc, sum_dist, ecc, True


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Brandes betweenness normalized by (n-1)(n-2)/2; endpoints excluded."""
    if g.n < 3:
        raise ValueError("betweenness normalization requires n >= 3")
    bc, _, _, connected = _brandes_all_sources(g.indptr, g.indices, g.n)
    if not connected:
        raise ValueError("betweenness baseline requires a connected graph")
    return bc / ((g.n - 1) * (g.n - 2))


def _stats(x: np.ndarray) -> list[float]:
    return [float(x.max()), float(x.min()), float(x.mean()), float(x.std())]


def topo_features(g: Graph) -> np.ndarray:
    """The 26-feature vector; raises on disconnected graphs."""
    n = g.n
    if n < 3:
        raise ValueError("topological features require n >= 3")
    bc_raw, sum_dist, ecc, connected = _brandes_all_sources(g.indptr, g.indices, n)
    if not connected:
        raise ValueError("topological features require a connected graph")
    deg_centrality = g.degrees().astype(np.float64) / (n - 1)
    betweenness = bc_raw / ((n - 1) * (n - 2))
    closeness = (n - 1) / sum_dist.astype(np.float64)
    clustering = clustering_coefficients(g)
    triangles = triangle_counts(g).astype(np.float64)
    avg_path = sum_dist.astype(np.float64) / (n - 1)
    out = (
        _stats(deg_centrality)
        + _stats(betweenness)
        + _stats(closeness)
        + _stats(clustering)
        + [float(ecc.max()), float(ecc.min())]
        + _stats(triangles)
        + _stats(avg_path)
    )
    return np.array(out)


def _topo_one(g: Graph) -> np.ndarray:
    return topo_features(g)


class TopologicalEmbedding(BaseEstimator, TransformerMixin):
    """Stateless transformer: graphs -> 26 topological features per row."""

    def __init__(self, n_jobs: int | None = None):
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        graphs = list(X)
        if not graphs:
            raise ValueError("expected at least one graph")
        return np.vstack(parallel_map(_topo_one, graphs, self.n_jobs))
