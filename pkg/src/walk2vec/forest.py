"""Random forest for the binary model-selection decision, plus AUC.

Each tree grows on a seeded bootstrap sample; splits pick the best
Gini-impurity midpoint threshold among ceil(sqrt(F)) sampled candidate
features, with deterministic tie-breaking (lowest feature index, then lowest
threshold). Trees grow to purity. Scores are the fraction of trees voting
class 1, with tied leaves voting 0.5.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array, check_X_y

from .seeding import philox_rng

MODEL_FORMAT = "walk2vec-forest-v1"


@dataclass
class _Tree:
    """Flat node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    count0: np.ndarray
    count1: np.ndarray

    def scores(self, x: np.ndarray) -> np.ndarray:
        """Per-sample vote: 1.0 / 0.0 by leaf majority, 0.5 on leaf ties."""
        node = np.zeros(len(x), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            nd = node[idx]
            goes_left = x[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(goes_left, self.left[nd], self.right[nd])
            active[idx] = self.feature[node[idx]] >= 0
        c0, c1 = self.count0[node], self.count1[node]
        return np.where(c1 > c0, 1.0, np.where(c1 < c0, 0.0, 0.5))


def _build_tree(x: np.ndarray, y: np.ndarray, rng) -> _Tree:
    n_features = x.shape[1]
    mtry = math.ceil(math.sqrt(n_features))
    feature, threshold, left, right, count0, count1 = [], [], [], [], [], []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        count0.append(0)
        count1.append(0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        ys = y[idx]
        n1 = int(ys.sum())
        n0 = len(ys) - n1
        count0[node], count1[node] = n0, n1
        if len(idx) < 2 or n0 == 0 or n1 == 0:
            continue
        cand = np.sort(rng.choice(n_features, size=mtry, replace=False))
        split = _best_split(x, ys, idx, cand)
        if split is None:
            continue
        f, thr = split
        feature[node] = f
        threshold[node] = thr
        go_left = x[idx, f] <= thr
        left[node] = new_node()
        right[node] = new_node()
        stack.append((left[node], idx[go_left]))
        stack.append((right[node], idx[~go_left]))
    return _Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        count0=np.array(count0, dtype=np.int64),
        count1=np.array(count1, dtype=np.int64),
    )


def _best_split(x, ys, idx, cand_features):
    """Lowest weighted Gini impurity over midpoint thresholds.

    cand_features must be ascending so equal impurities resolve to the
    lowest feature index; within a feature the first (lowest) threshold wins.
    """
    m = len(idx)
    best = None
    for f in cand_features:
        vals = x[idx, f]
        order = np.argsort(vals, kind="stable")
        xs = vals[order]
        c1 = np.cumsum(ys[order])
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if len(cut) == 0:
            continue
        nl = (cut + 1).astype(np.float64)
        nr = m - nl
        l1 = c1[cut].astype(np.float64)
        l0 = nl - l1
        r1 = c1[-1] - l1
        r0 = nr - r1
        impurity = (nl - (l0 * l0 + l1 * l1) / nl + nr - (r0 * r0 + r1 * r1) / nr) / m
        k = int(np.argmin(impurity))
        if best is None or impurity[k] < best[0]:
            thr = 0.5 * (xs[cut[k]] + xs[cut[k] + 1])
            best = (impurity[k], int(f), float(thr))
    if best is None:
        return None
    return best[1], best[2]


class RandomForest(BaseEstimator):
    """Bagged Gini decision trees with vote-fraction scoring.

    Deterministic given (data order, random_state): tree t draws its
    bootstrap and split candidates from an independent Philox stream keyed
    (random_state, t).
    """

    def __init__(self, n_trees: int = 100, random_state: int = 0):
        self.n_trees = n_trees
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = y.astype(np.int64)
        if set(np.unique(y)) - {0, 1}:
            raise ValueError("labels must be 0/1")
        if len(np.unique(y)) < 2:
            raise ValueError("training data must contain both classes")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        n = len(y)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        self.trees_ = []
        for t in range(self.n_trees):
            rng = philox_rng(self.random_state, t)
            boot = rng.integers(0, n, size=n)
            self.trees_.append(_build_tree(X[boot], y[boot], rng))
        return self

    def _check_ready(self, X) -> np.ndarray:
        if not hasattr(self, "trees_"):
            raise NotFittedError("RandomForest is not fitted")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X

    def predict_score(self, X) -> np.ndarray:
        """Fraction of trees voting class 1, in [0, 1]."""
        X = self._check_ready(X)
        votes = np.zeros(len(X))
        for tree in self.trees_:
            votes += tree.scores(X)
        return votes / self.n_trees

    def predict_proba(self, X) -> np.ndarray:
        s = self.predict_score(X)
        return np.column_stack([1.0 - s, s])

    def predict(self, X) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_json_dict(self) -> dict:
        if not hasattr(self, "trees_"):
            raise NotFittedError("RandomForest is not fitted")
        return {
            "format": MODEL_FORMAT,
            "n_trees": self.n_trees,
            "random_state": self.random_state,
            "n_features": self.n_features_in_,
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "count0": t.count0.tolist(),
                    "count1": t.count1.tolist(),
                }
                for t in self.trees_
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "RandomForest":
        if payload.get("format") != MODEL_FORMAT:
            raise ValueError(f"unrecognized model format {payload.get('format')!r}")
        model = cls(n_trees=payload["n_trees"], random_state=payload["random_state"])
        model.n_features_in_ = payload["n_features"]
        model.classes_ = np.array([0, 1])
        model.trees_ = [
            _Tree(
                feature=np.asarray(t["feature"], dtype=np.int64),
                threshold=np.asarray(t["threshold"], dtype=np.float64),
                left=np.asarray(t["left"], dtype=np.int64),
                right=np.asarray(t["right"], dtype=np.int64),
                count0=np.asarray(t["count0"], dtype=np.int64),
                count1=np.asarray(t["count1"], dtype=np.int64),
            )
            for t in payload["trees"]
        ]
        return model

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path) -> "RandomForest":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score+ > score-) + 0.5 P(score+ = score-).

    Rank-based (average ranks handle ties), O(n log n).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length vectors")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC requires both classes present")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
