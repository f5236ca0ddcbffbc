"""Shared fixtures and independent dense-arithmetic oracles.

Every oracle here recomputes quantities from the dense adjacency matrix with
plain numpy so the sparse implementation has a genuinely separate path to be
checked against.
"""

from __future__ import annotations

import numpy as np
import pytest

from walk2vec import Graph, from_edge_list


def dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges():
        a[i, j] = a[j, i] = 1.0
    return a


def dense_trajectory(g: Graph, p0, tau: int) -> np.ndarray:
    """(tau+1, n) walk distributions via dense W = D^-1 A matrix products."""
    a = dense_adjacency(g)
    deg = a.sum(axis=1)
    w = a / deg[:, np.newaxis]
    steps = [np.asarray(p0, dtype=float)]
    for _ in range(tau):
        steps.append(w.T @ steps[-1])
    return np.array(steps)


def dense_distance_matrix(steps: np.ndarray, deg: np.ndarray) -> np.ndarray:
    scaled = steps / np.sqrt(deg)
    t = len(steps)
    m = np.zeros((t, t))
    for s in range(t):
        for u in range(s + 1, t):
            m[s, u] = m[u, s] = np.sqrt(((scaled[s] - scaled[u]) ** 2).sum())
    return m


def dense_similarity_matrix(steps: np.ndarray, deg: np.ndarray) -> np.ndarray:
    t = len(steps)
    m = np.eye(t)
    norms = [np.sqrt((p * p / deg).sum()) for p in steps]
    for s in range(t):
        for u in range(t):
            m[s, u] = (steps[s] * steps[u] / deg).sum() / (norms[s] * norms[u])
    return m


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Test-local ER sampler, independent of the package generators."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j))
    return from_edge_list(n, edges)


def random_graph_min_degree(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Resamples until min degree >= 1 so walk preconditions hold."""
    for _ in range(200):
        g = random_graph(n, p, rng)
        if g.n and g.degrees().min() >= 1:
            return g
    raise AssertionError("could not sample a graph with min degree >= 1")


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260811)


# small named graphs used across modules
@pytest.fixture
def k2() -> Graph:
    return from_edge_list(2, [(0, 1)])


@pytest.fixture
def path3() -> Graph:
    return from_edge_list(3, [(0, 1), (1, 2)])


@pytest.fixture
def cycle4() -> Graph:
    return from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def star5() -> Graph:
    return from_edge_list(5, [(0, i) for i in range(1, 5)])


@pytest.fixture
def k4() -> Graph:
    return from_edge_list(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
