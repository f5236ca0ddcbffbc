"""LASSO sparse coding and online dictionary learning.

The LASSO objective is (1/2)||D y - x||_2^2 + lambda1 ||y||_1, solved by
cyclic coordinate descent with soft-thresholding on the Gram matrix. The
solver stops once the sweep-to-sweep coordinate change is <= 1e-8 AND the
stationarity (KKT) residuals are within 5e-7, capped at 10,000 sweeps, so
returned codes always satisfy the 1e-6 stationarity contract.

Dictionary learning is online: mini-batches are sparse-coded against the
current dictionary, sufficient statistics are accumulated, and atoms are
refreshed by block coordinate descent with projection onto the unit ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .seeding import philox_rng

CD_TOL = 1e-8
CD_KKT_TOL = 5e-7
CD_MAX_SWEEPS = 10_000


@njit(cache=True)
def _cd_batch(gram, cov, lam, tol, kkt_tol, max_sweeps):
    """Solve one LASSO per row of cov; cov[i] = D^T x_i, gram = D^T D."""
    n, k = cov.shape
    out = np.zeros((n, k))
    q = np.empty(k)
    for i in range(n):
        c = cov[i]
        y = out[i]
        for j in range(k):
            q[j] = 0.0
        sweeps = 0
        while sweeps < max_sweeps:
            sweeps += 1
            max_delta = 0.0
            for j in range(k):
                gjj = gram[j, j]
                if gjj <= 1e-12:
                    continue
                z = c[j] - q[j] + gjj * y[j]
                if z > lam:
                    y_new = (z - lam) / gjj
                elif z < -lam:
                    y_new = (z + lam) / gjj
                else:
                    y_new = 0.0
                d = y_new - y[j]
                if d != 0.0:
                    if abs(d) > max_delta:
                        max_delta = abs(d)
                    row = gram[j]
                    for t in range(k):
                        q[t] += row[t] * d
                    y[j] = y_new
            if max_delta > tol:
                # iterate the active set until it settles, then re-sweep all
                while sweeps < max_sweeps:
                    sweeps += 1
                    act_delta = 0.0
                    for j in range(k):
                        if y[j] == 0.0:
                            continue
                        gjj = gram[j, j]
                        z = c[j] - q[j] + gjj * y[j]
                        if z > lam:
                            y_new = (z - lam) / gjj
                        elif z < -lam:
                            y_new = (z + lam) / gjj
                        else:
                            y_new = 0.0
                        d = y_new - y[j]
                        if d != 0.0:
                            if abs(d) > act_delta:
                                act_delta = abs(d)
                            row = gram[j]
                            for t in range(k):
                                q[t] += row[t] * d
                            y[j] = y_new
                    if act_delta <= tol:
                        break
                continue
            # stationarity residuals: active |r_j + lam*sign| and idle |r_j|-lam
            ok = True
            for j in range(k):
                r = q[j] - c[j]
                if y[j] > 0.0:
                    if abs(r + lam) > kkt_tol:
                        ok = False
                        break
                elif y[j] < 0.0:
                    if abs(r - lam) > kkt_tol:
                        ok = False
                        break
                else:
                    if abs(r) > lam + kkt_tol:
                        ok = False
                        break
            if ok:
                break
    return out


@dataclass
class Dictionary:
    """d x K matrix of atoms (columns) with the sparsity weight they were
    trained for. Column norms stay within the unit ball."""

    atoms: np.ndarray
    lambda1: float
    heldout_objectives: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        self.atoms = np.ascontiguousarray(self.atoms, dtype=np.float64)
        if self.atoms.ndim != 2 or self.atoms.shape[1] < 1:
            raise ValueError("dictionary atoms must form a d x K matrix with K >= 1")
        norms = np.linalg.norm(self.atoms, axis=0)
        if norms.max(initial=0.0) > 1.0 + 1e-9:
            raise ValueError("dictionary atoms must lie in the unit ball")
        if not np.isfinite(self.atoms).all():
            raise ValueError("dictionary atoms must be finite")

    @property
    def dim(self) -> int:
        return self.atoms.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]


def lasso(dictionary: Dictionary, x) -> np.ndarray:
    """Sparse code of a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (dictionary.dim,):
        raise ValueError(f"feature has shape {x.shape}, expected ({dictionary.dim},)")
    return sparse_encode(dictionary, x[np.newaxis, :])[0]


def sparse_encode(dictionary: Dictionary, features) -> np.ndarray:
    """Row-wise LASSO codes, shape (n_samples, K)."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != dictionary.dim:
        raise ValueError(
            f"features must be (n, {dictionary.dim}), got {x.shape}"
        )
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    d = dictionary.atoms
    gram = np.ascontiguousarray(d.T @ d)
    cov = np.ascontiguousarray(x @ d)
    return _cd_batch(gram, cov, dictionary.lambda1, CD_TOL, CD_KKT_TOL, CD_MAX_SWEEPS)


def lasso_objective(dictionary: Dictionary, x, y) -> float:
    r = dictionary.atoms @ np.asarray(y) - np.asarray(x)
    return 0.5 * float(r @ r) + dictionary.lambda1 * float(np.abs(y).sum())


def dict_learn(
    features,
    n_atoms: int,
    lambda1: float,
    epochs: int = 5,
    seed: int = 0,
    batch_size: int = 256,
) -> Dictionary:
    """Learn a dictionary of unit-ball atoms from feature vectors.

    A seeded 10% split is held out; the mean LASSO objective on it is
    evaluated after every epoch and recorded on the returned Dictionary's
    ``heldout_objectives``. Atoms are initialized from distinct training
    features (seeded sampling) and updated per mini-batch from accumulated
    sufficient statistics.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("training features must be a nonempty (n, d) array")
    if not np.isfinite(x).all():
        raise ValueError("training features must be finite")
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    n, dim = x.shape

    rng = philox_rng(seed)
    order = rng.permutation(n)
    n_hold = max(1, n // 10) if n >= 2 else 0
    hold_idx = order[:n_hold]
    train_idx = order[n_hold:]
    if len(train_idx) == 0:
        train_idx = order
        hold_idx = order

    # init: distinct training features where possible, unit-normalized
    init_pick = rng.choice(len(train_idx), size=n_atoms, replace=n_atoms > len(train_idx))
    atoms = x[train_idx[init_pick]].T.copy()
    norms = np.linalg.norm(atoms, axis=0)
    dead = norms <= 1e-12
    if dead.any():
        repl = rng.standard_normal((dim, int(dead.sum())))
        atoms[:, dead] = repl
        norms = np.linalg.norm(atoms, axis=0)
    atoms /= norms

    stat_a = np.zeros((n_atoms, n_atoms))
    stat_b = np.zeros((dim, n_atoms))
    objectives = []
    for _ in range(epochs):
        epoch_order = train_idx[rng.permutation(len(train_idx))]
        for start in range(0, len(epoch_order), batch_size):
            batch = x[epoch_order[start : start + batch_size]]
            codes = sparse_encode(Dictionary(atoms, lambda1), batch)
            stat_a += codes.T @ codes
            stat_b += batch.T @ codes
            _update_atoms(atoms, stat_a, stat_b)
        objectives.append(_mean_objective(atoms, lambda1, x[hold_idx]))
    return Dictionary(atoms=atoms, lambda1=lambda1, heldout_objectives=objectives)


def _update_atoms(atoms: np.ndarray, stat_a: np.ndarray, stat_b: np.ndarray) -> None:
    """One block-coordinate pass over atoms; projects onto the unit ball."""
    k = atoms.shape[1]
    for j in range(k):
        ajj = stat_a[j, j]
        if ajj <= 1e-10:
            continue  # unused atom, leave as-is
        u = atoms[:, j] + (stat_b[:, j] - atoms @ stat_a[:, j]) / ajj
        atoms[:, j] = u / max(1.0, np.linalg.norm(u))


def _mean_objective(atoms: np.ndarray, lambda1: float, held: np.ndarray) -> float:
    d = Dictionary(atoms.copy(), lambda1)
    codes = sparse_encode(d, held)
    resid = codes @ atoms.T - held
    return float(
        0.5 * np.einsum("ij,ij->", resid, resid) / len(held)
        + lambda1 * np.abs(codes).sum() / len(held)
    )


def save_dictionary(dictionary: Dictionary, path) -> None:
    """Text format: header "d K lambda1", then one atom (column) per line,
    d space-separated decimals with 17 significant digits (bitwise
    round-trip)."""
    d, k = dictionary.atoms.shape
    with open(path, "w") as fh:
        fh.write(f"{d} {k} {dictionary.lambda1:.17g}\n")
        for j in range(k):
            fh.write(" ".join(f"{v:.17g}" for v in dictionary.atoms[:, j]) + "\n")


def load_dictionary(path) -> Dictionary:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: expected header 'd K lambda1'")
        d, k, lambda1 = int(header[0]), int(header[1]), float(header[2])
        atoms = np.empty((d, k))
        for j in range(k):
            parts = fh.readline().split()
            if len(parts) != d:
                raise ValueError(f"{path}: atom {j} has {len(parts)} values, expected {d}")
            atoms[:, j] = [float(v) for v in parts]
    return Dictionary(atoms=atoms, lambda1=lambda1)
