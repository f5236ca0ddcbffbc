"""Random-walk trajectories, distance/similarity matrices, and walk features.

The walk operator is W = D^-1 A, so one step maps a distribution p to
W^T p = A (p / d). Features correlate the tau+1 distributions of a walk via
the degree-weighted pairwise L2 distance matrix (or a cosine similarity
variant) and keep its strict upper triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph import Graph, pagerank

DISTRIBUTION_TOL = 1e-12
PAGERANK_TIE_TOL = 1e-9

METRICS = ("distance", "similarity")


def feature_dim(tau: int) -> int:
    """Feature length (tau^2 + tau) / 2, the strict upper triangle count."""
    return (tau * tau + tau) // 2


def validate_distribution(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (n,):
        raise ValueError(f"distribution has shape {p.shape}, expected ({n},)")
    if p.min(initial=0.0) < 0.0:
        raise ValueError("distribution has negative entries")
    if abs(p.sum() - 1.0) > DISTRIBUTION_TOL:
        raise ValueError(f"distribution sums to {p.sum()!r}, not 1")
    return p


def _check_min_degree(g: Graph) -> np.ndarray:
    deg = g.degrees()
    if g.n == 0 or deg.min() < 1:
        raise ValueError("walk operations require min degree >= 1 (no isolated nodes)")
    return deg


def _walk_operator(g: Graph):
    """W^T = A D^-1 as a sparse or dense matrix, chosen by density."""
    deg = g.degrees().astype(np.float64)
    a = g.as_csr()
    density = len(g.indices) / max(g.n * g.n, 1)
    if density > 0.15:
        return a.toarray() * (1.0 / deg)[np.newaxis, :]
    wt = a.copy()
    wt.data = wt.data / deg[wt.indices]
    return wt


def transition_step(g: Graph, p) -> np.ndarray:
    """One walk step: out_j = sum_{i in adj(j)} p_i / d_i."""
    deg = _check_min_degree(g).astype(np.float64)
    p = validate_distribution(p, g.n)
    return g.as_csr().dot(p / deg)


@dataclass(frozen=True)
class WalkTrajectory:
    """tau+1 walk distributions; steps[t] is the distribution after t steps."""

    steps: np.ndarray  # (tau + 1, n)
    tau: int


def walk_trajectory(g: Graph, p0, tau: int) -> WalkTrajectory:
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    deg = _check_min_degree(g).astype(np.float64)
    p0 = validate_distribution(p0, g.n)
    wt = _walk_operator(g)
    steps = np.empty((tau + 1, g.n))
    steps[0] = p0
    for t in range(1, tau + 1):
        steps[t] = wt.dot(steps[t - 1])
    return WalkTrajectory(steps=steps, tau=tau)


def stationary_distribution(g: Graph) -> np.ndarray:
    """Degree-proportional limit: omega_i = d_i / sum_k d_k."""
    deg = _check_min_degree(g).astype(np.float64)
    return deg / deg.sum()


def distance_matrix(traj: WalkTrajectory, degs) -> np.ndarray:
    """M[s, t] = || D^-1/2 p_s - D^-1/2 p_t ||_2, symmetric, zero diagonal."""
    u = _scaled_steps(traj, degs)
    s = traj.tau + 1
    m = np.zeros((s, s))
    for a in range(s):
        for b in range(a + 1, s):
            m[a, b] = m[b, a] = np.linalg.norm(u[a] - u[b])
    return m


def similarity_matrix(traj: WalkTrajectory, degs) -> np.ndarray:
    """Cosine similarity of degree-scaled steps; diagonal 1, entries in [0, 1]."""
    u = _scaled_steps(traj, degs)
    norms = np.linalg.norm(u, axis=1)
    if norms.min() <= 0.0:
        raise ValueError("similarity matrix undefined for a zero step vector")
    s = (u @ u.T) / np.outer(norms, norms)
    return np.clip(s, 0.0, 1.0)


def _scaled_steps(traj: WalkTrajectory, degs) -> np.ndarray:
    degs = np.asarray(degs, dtype=np.float64)
    if degs.shape != (traj.steps.shape[1],):
        raise ValueError("degree vector length does not match trajectory")
    if degs.min() < 1:
        raise ValueError("degree-weighted metrics require all degrees >= 1")
    return traj.steps / np.sqrt(degs)[np.newaxis, :]


def strict_upper_triangle(m: np.ndarray) -> np.ndarray:
    """Row-major flattening (0,1), (0,2), ..., (0,tau), (1,2), ..."""
    iu = np.triu_indices(m.shape[0], k=1)
    return m[iu]


def walk_feature(g: Graph, p0, tau: int, metric: str = "distance") -> np.ndarray:
    """Length-(tau^2+tau)/2 feature: strict upper triangle of M (or S)."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    traj = walk_trajectory(g, p0, tau)
    degs = g.degrees()
    m = distance_matrix(traj, degs) if metric == "distance" else similarity_matrix(traj, degs)
    return strict_upper_triangle(m)


def node_walk_features(g: Graph, tau: int, metric: str = "distance") -> np.ndarray:
    """Per-node delta-initialized walk features, all nodes at once.

    Row i equals walk_feature(g, e_i, tau, metric); computed via dense
    matrix powers of the walk operator so the whole graph costs tau
    matrix products instead of n separate trajectories.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    deg = _check_min_degree(g).astype(np.float64)
    n = g.n
    wt = _walk_operator(g)
    inv_sqrt_d = 1.0 / np.sqrt(deg)
    # u[t] = D^-1/2 (W^T)^t; column i is the scaled step-t distribution of e_i
    u = np.empty((tau + 1, n, n))
    p = np.eye(n)
    u[0] = inv_sqrt_d[:, np.newaxis] * p
    for t in range(1, tau + 1):
        p = wt.dot(p)
        u[t] = inv_sqrt_d[:, np.newaxis] * p
    del p
    d = feature_dim(tau)
    out = np.empty((n, d))
    if metric == "distance":
        idx = 0
        for s in range(tau + 1):
            for t in range(s + 1, tau + 1):
                diff = u[s] - u[t]
                np.sqrt(np.einsum("ij,ij->j", diff, diff), out=out[:, idx])
                idx += 1
    else:
        norms = np.sqrt(np.einsum("tij,tij->tj", u, u))
        idx = 0
        for s in range(tau + 1):
            for t in range(s + 1, tau + 1):
                dots = np.einsum("ij,ij->j", u[s], u[t])
                out[:, idx] = np.clip(dots / (norms[s] * norms[t]), 0.0, 1.0)
                idx += 1
    return out


class DegreeLandmarks(NamedTuple):
    """Node ids of the four degree landmarks, in stacking order."""

    max: int
    min: int
    median: int
    mean: int


def _pick(cands: np.ndarray, pr: np.ndarray, highest: bool) -> tuple[int, bool]:
    vals = pr[cands]
    best = vals.max() if highest else vals.min()
    sel = cands[np.abs(vals - best) <= PAGERANK_TIE_TOL]
    return int(sel.min()), len(sel) == 1


def _landmarks_with_flags(g: Graph) -> tuple[DegreeLandmarks, tuple[bool, ...]]:
    deg = _check_min_degree(g)
    pr = pagerank(g)
    n = g.n
    dmax = np.flatnonzero(deg == deg.max())
    dmin = np.flatnonzero(deg == deg.min())
    med_target = np.sort(deg)[(n - 1) // 2]
    med_gap = np.abs(deg - med_target)
    dmed = np.flatnonzero(med_gap == med_gap.min())
    mean_gap = np.abs(deg - deg.mean())
    dmean = np.flatnonzero(mean_gap == mean_gap.min())
    picks = (
        _pick(dmax, pr, highest=True),
        _pick(dmin, pr, highest=False),
        _pick(dmed, pr, highest=True),
        _pick(dmean, pr, highest=True),
    )
    ids = DegreeLandmarks(*(p[0] for p in picks))
    return ids, tuple(p[1] for p in picks)


def select_degree_landmarks(g: Graph) -> DegreeLandmarks:
    """Nodes of max/min degree and nodes closest to the median/mean degree.

    Ties: max degree -> highest PageRank; min degree -> lowest PageRank;
    median/mean -> highest PageRank; PageRank compared with 1e-9 tolerance,
    residual ties -> lowest node id. The median target is the lower median
    of the sorted degree sequence.
    """
    return _landmarks_with_flags(g)[0]


def landmark_keys_unique(g: Graph) -> bool:
    """True when all four landmarks resolve without the lowest-id fallback."""
    return all(_landmarks_with_flags(g)[1])


def delta_distribution(n: int, i: int) -> np.ndarray:
    if not (0 <= i < n):
        raise ValueError(f"node id {i} out of range [0, {n})")
    e = np.zeros(n)
    e[i] = 1.0
    return e


def ego_uniform_distribution(g: Graph, i: int) -> np.ndarray:
    """Uniform over {i} union adj(i)."""
    if not (0 <= i < g.n):
        raise ValueError(f"node id {i} out of range [0, {g.n})")
    nb = g.neighbors(i)
    p = np.zeros(g.n)
    p[i] = 1.0
    p[nb] = 1.0
    return p / p.sum()
