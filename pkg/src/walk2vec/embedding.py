"""Whole-graph embeddings and their sklearn-style transformer wrappers.

The landmark embedding stacks walk features started from delta distributions
at the four degree landmarks (max, min, median, mean - frozen order). The
sparse-coding embedding starts one walk per node, codes every per-node
feature against a learned dictionary, and pools the codes.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .graph import Graph
from .parallel import parallel_map
from .seeding import mix64, philox_rng
from .sparse_coding import Dictionary, dict_learn, sparse_encode
from .walks import (
    delta_distribution,
    feature_dim,
    node_walk_features,
    select_degree_landmarks,
    walk_feature,
)

POOLING_MODES = ("average", "max")


def embed_walk2vec(g: Graph, tau: int = 15, metric: str = "distance") -> np.ndarray:
    """Stacked landmark features, length 4 * (tau^2 + tau) / 2."""
    lm = select_degree_landmarks(g)
    blocks = [
        walk_feature(g, delta_distribution(g.n, i), tau, metric)
        for i in (lm.max, lm.min, lm.median, lm.mean)
    ]
    return np.concatenate(blocks)


def pool(codes, mode: str = "average") -> np.ndarray:
    """Order-free reduction over per-node codes (componentwise mean or max)."""
    if mode not in POOLING_MODES:
        raise ValueError(f"pooling mode must be one of {POOLING_MODES}, got {mode!r}")
    codes = np.asarray(codes, dtype=np.float64)
    if codes.ndim != 2 or codes.shape[0] == 0:
        raise ValueError("codes must be a nonempty (n, K) array of equal-length rows")
    return codes.mean(axis=0) if mode == "average" else codes.max(axis=0)


def embed_sc(
    g: Graph,
    dictionary: Dictionary,
    tau: int = 15,
    pooling: str = "average",
    metric: str = "distance",
) -> np.ndarray:
    """Pooled sparse codes of per-node walk features, length K."""
    if dictionary.dim != feature_dim(tau):
        raise ValueError(
            f"dictionary dimension {dictionary.dim} does not match "
            f"tau={tau} (feature length {feature_dim(tau)})"
        )
    feats = node_walk_features(g, tau, metric)
    codes = sparse_encode(dictionary, feats)
    return pool(codes, pooling)


def tau_from_feature_dim(d: int) -> int:
    """Invert d = (tau^2 + tau) / 2; raises if d is not of that form."""
    tau = int((math.isqrt(8 * d + 1) - 1) // 2)
    if feature_dim(tau) != d:
        raise ValueError(f"{d} is not a valid walk-feature length")
    return tau


def _validate_graphs(graphs) -> list[Graph]:
    graphs = list(graphs)
    if not graphs:
        raise ValueError("expected at least one graph")
    for g in graphs:
        if not isinstance(g, Graph):
            raise TypeError(f"expected Graph instances, got {type(g).__name__}")
    return graphs


def _w2v_one(args):
    g, tau, metric = args
    return embed_walk2vec(g, tau, metric)


def _features_one(args):
    g, tau, metric = args
    return node_walk_features(g, tau, metric)


def _sc_one(args):
    g, dictionary, tau, pooling, metric = args
    return embed_sc(g, dictionary, tau, pooling, metric)


class Walk2VecEmbedding(BaseEstimator, TransformerMixin):
    """Stateless transformer: graphs -> stacked landmark walk features.

    Output dimension is 2 (tau^2 + tau), independent of graph size.
    """

    def __init__(self, tau: int = 15, metric: str = "distance", n_jobs: int | None = None):
        self.tau = tau
        self.metric = metric
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        _validate_graphs(X)
        return self

    def transform(self, X) -> np.ndarray:
        graphs = _validate_graphs(X)
        rows = parallel_map(_w2v_one, [(g, self.tau, self.metric) for g in graphs], self.n_jobs)
        return np.vstack(rows)


class Walk2VecSCEmbedding(BaseEstimator, TransformerMixin):
    """Dictionary-learning transformer: graphs -> pooled sparse codes.

    fit() learns the dictionary from per-node walk features of the training
    graphs (subsampled to at most max_train_features vectors); transform()
    sparse-codes every node of each graph and pools.
    """

    def __init__(
        self,
        tau: int = 15,
        n_atoms: int = 100,
        lambda1: float = 0.15,
        epochs: int = 5,
        batch_size: int = 256,
        max_train_features: int = 50_000,
        pooling: str = "average",
        metric: str = "distance",
        random_state: int = 0,
        n_jobs: int | None = None,
    ):
        self.tau = tau
        self.n_atoms = n_atoms
        self.lambda1 = lambda1
        self.epochs = epochs
        self.batch_size = batch_size
        self.max_train_features = max_train_features
        self.pooling = pooling
        self.metric = metric
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        graphs = _validate_graphs(X)
        feats = parallel_map(
            _features_one, [(g, self.tau, self.metric) for g in graphs], self.n_jobs
        )
        corpus = subsample_features(
            feats, self.max_train_features, mix64(self.random_state, 0xD1C7)
        )
        self.dictionary_ = dict_learn(
            corpus,
            n_atoms=self.n_atoms,
            lambda1=self.lambda1,
            epochs=self.epochs,
            seed=mix64(self.random_state, 0x5EED),
            batch_size=self.batch_size,
        )
        return self

    @classmethod
    def from_dictionary(cls, dictionary: Dictionary, pooling="average", metric="distance", n_jobs=None):
        est = cls(
            tau=tau_from_feature_dim(dictionary.dim),
            n_atoms=dictionary.n_atoms,
            lambda1=dictionary.lambda1,
            pooling=pooling,
            metric=metric,
            n_jobs=n_jobs,
        )
        est.dictionary_ = dictionary
        return est

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "dictionary_"):
            raise NotFittedError("Walk2VecSCEmbedding must be fitted (or given a dictionary)")
        graphs = _validate_graphs(X)
        rows = parallel_map(
            _sc_one,
            [(g, self.dictionary_, self.tau, self.pooling, self.metric) for g in graphs],
            self.n_jobs,
        )
        return np.vstack(rows)


def subsample_features(per_graph_features, max_vectors: int, seed: int) -> np.ndarray:
    """Seeded uniform sample of at most max_vectors rows across all graphs."""
    counts = [f.shape[0] for f in per_graph_features]
    total = int(np.sum(counts))
    if total <= max_vectors:
        return np.vstack(per_graph_features)
    pick = np.sort(philox_rng(seed).choice(total, size=max_vectors, replace=False))
    offsets = np.concatenate([[0], np.cumsum(counts)])
    out = np.empty((max_vectors, per_graph_features[0].shape[1]))
    gi = 0
    for row, flat in enumerate(pick):
        while flat >= offsets[gi + 1]:
            gi += 1
        out[row] = per_graph_features[gi][flat - offsets[gi]]
    return out
