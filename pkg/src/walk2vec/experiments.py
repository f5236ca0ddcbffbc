"""Grid sweeps, train/test protocol, theoretical thresholds, and PCA.

Every random choice in a sweep comes from a seed derived with mix64 over
(grid seed, cell index, role, class, instance index), where role 0 tags
graph instances, role 1 the dictionary, role 2 the forest. Cells are
therefore independent and reproducible, and parallel execution equals
sequential execution.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .embedding import embed_sc, embed_walk2vec, pool, subsample_features
from .forest import RandomForest, auc
from .generators import ModelParams, sbm_params_from
from .parallel import parallel_map
from .seeding import mix64
from .sparse_coding import dict_learn, sparse_encode
from .topo import topo_features
from .walks import node_walk_features

ROLE_GRAPH = 0
ROLE_DICT = 1
ROLE_FOREST = 2

PROBLEMS = ("er_vs_sbm", "planted_clique")
METHODS = ("walk2vec", "walk2vec-sc", "topological")

RESULTS_CSV_HEADER = "problem,method,n,p,secondary,threshold,auc,n_train,n_test,seed,wall_ms"
PCA_CSV_HEADER = "graph_id,class,param,x,y"


def delta_crit(p: float, n: int) -> float:
    """Detectability threshold for SBM vs ER at matched density: 2 sqrt(p/n)."""
    if p <= 0 or n <= 0:
        raise ValueError("delta_crit requires p > 0 and n > 0")
    return 2.0 * math.sqrt(p / n)


def beta_crit(p: float) -> float:
    """Planted-clique detection threshold: sqrt(p / (1 - p))."""
    if not (0.0 < p < 1.0):
        raise ValueError("beta_crit requires 0 < p < 1")
    return math.sqrt(p / (1.0 - p))


@dataclass(frozen=True)
class ExperimentGrid:
    """Sweep specification; JSON documents mirror these fields exactly."""

    problem: str
    n: int
    p_values: tuple
    secondary_values: tuple
    graphs_per_class: int = 400
    train_fraction: float = 0.5
    tau: int = 15
    method: str = "walk2vec-sc"
    pooling: str = "average"
    metric: str = "distance"
    n_trees: int = 100
    n_atoms: int = 100
    lambda1: float = 0.15
    epochs: int = 5
    batch_size: int = 256
    max_train_features: int = 50_000
    seed: int = 0

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError("train_fraction must be in (0, 1)")
        if self.graphs_per_class < 2:
            raise ValueError("graphs_per_class must be >= 2")
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(
            self, "secondary_values", tuple(float(s) for s in self.secondary_values)
        )
        for p in self.p_values:
            for s in self.secondary_values:
                self._cell_params(p, s)  # validates every combination

    def _cell_params(self, p: float, secondary: float) -> tuple[ModelParams, ModelParams]:
        """(class-0 params, class-1 params) for one cell."""
        null = ModelParams("er", self.n, p=p)
        if self.problem == "er_vs_sbm":
            p_in, p_out = sbm_params_from(p, secondary)
            return null, ModelParams("sbm", self.n, p_in=p_in, p_out=p_out)
        k = int(round(secondary * math.sqrt(self.n)))
        if k < 2:
            # beta too small to plant anything: class 1 is plain ER (null cell)
            return null, null
        return null, ModelParams("clique", self.n, p=p, k=k)

    @classmethod
    def from_json(cls, payload: dict) -> "ExperimentGrid":
        known = set(cls.__dataclass_fields__)
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown grid config fields: {sorted(unknown)}")
        missing = {"problem", "n", "p_values", "secondary_values"} - set(payload)
        if missing:
            raise ValueError(f"grid config missing required fields: {sorted(missing)}")
        return cls(**payload)

    def to_json(self) -> dict:
        out = asdict(self)
        out["p_values"] = list(self.p_values)
        out["secondary_values"] = list(self.secondary_values)
        return out


@dataclass
class CellResult:
    problem: str
    method: str
    n: int
    p: float
    secondary: float
    threshold: float
    auc: float
    n_train: int
    n_test: int
    seed: int
    wall_ms: float
    error: str | None = field(default=None, compare=False)

    def csv_row(self) -> str:
        return ",".join(
            [
                self.problem,
                self.method,
                str(self.n),
                _fmt(self.p),
                _fmt(self.secondary),
                _fmt(self.threshold),
                _fmt(self.auc),
                str(self.n_train),
                str(self.n_test),
                str(self.seed),
                _fmt(self.wall_ms),
            ]
        )


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def instance_seed(grid_seed: int, cell_index: int, class_id: int, instance: int) -> int:
    return mix64(grid_seed, cell_index, ROLE_GRAPH, class_id, instance)


def _gen_embed_w2v(args):
    params, seed, tau, metric = args
    return embed_walk2vec(params.generate(seed), tau, metric)


def _gen_embed_topo(args):
    params, seed = args
    return topo_features(params.generate(seed))


def _gen_features(args):
    params, seed, tau, metric = args
    return node_walk_features(params.generate(seed), tau, metric)


def _gen_embed_sc(args):
    params, seed, dictionary, tau, pooling, metric = args
    return embed_sc(params.generate(seed), dictionary, tau, pooling, metric)


def _encode_pool(args):
    feats, dictionary, pooling = args
    return pool(sparse_encode(dictionary, feats), pooling)


def run_cell(
    grid: ExperimentGrid,
    p: float,
    secondary: float,
    cell_index: int = 0,
    jobs: int | None = None,
    return_embeddings: bool = False,
):
    """Generate, embed, train, and score one (p, secondary) cell.

    Per-class instance seeds are derived from (grid.seed, cell_index); the
    first ceil(graphs_per_class * train_fraction) instances of each class
    are the training split, the rest the disjoint test split. For
    walk2vec-sc the dictionary is trained on training-split node features
    only.
    """
    t0 = time.perf_counter()
    params0, params1 = grid._cell_params(p, secondary)
    gpc = grid.graphs_per_class
    n_train = int(round(gpc * grid.train_fraction))
    n_train = min(max(n_train, 1), gpc - 1)
    seeds = {
        cls: [instance_seed(grid.seed, cell_index, cls, i) for i in range(gpc)]
        for cls in (0, 1)
    }
    train_items = [(params0, s) for s in seeds[0][:n_train]] + [
        (params1, s) for s in seeds[1][:n_train]
    ]
    test_items = [(params0, s) for s in seeds[0][n_train:]] + [
        (params1, s) for s in seeds[1][n_train:]
    ]
    y_train = np.array([0] * n_train + [1] * n_train)
    y_test = np.array([0] * (gpc - n_train) + [1] * (gpc - n_train))

    if grid.method == "walk2vec":
        embed_args = [(pp, s, grid.tau, grid.metric) for pp, s in train_items + test_items]
        rows = parallel_map(_gen_embed_w2v, embed_args, jobs)
    elif grid.method == "topological":
        rows = parallel_map(_gen_embed_topo, train_items + test_items, jobs)
    else:
        feats = parallel_map(
            _gen_features, [(pp, s, grid.tau, grid.metric) for pp, s in train_items], jobs
        )
        corpus = subsample_features(
            feats,
            grid.max_train_features,
            mix64(grid.seed, cell_index, ROLE_DICT, 0),
        )
        dictionary = dict_learn(
            corpus,
            n_atoms=grid.n_atoms,
            lambda1=grid.lambda1,
            epochs=grid.epochs,
            seed=mix64(grid.seed, cell_index, ROLE_DICT, 1),
            batch_size=grid.batch_size,
        )
        train_rows = parallel_map(
            _encode_pool, [(f, dictionary, grid.pooling) for f in feats], jobs
        )
        del feats, corpus
        test_rows = parallel_map(
            _gen_embed_sc,
            [(pp, s, dictionary, grid.tau, grid.pooling, grid.metric) for pp, s in test_items],
            jobs,
        )
        rows = train_rows + test_rows
    x = np.vstack(rows)
    x_train, x_test = x[: len(train_items)], x[len(train_items) :]

    forest = RandomForest(
        n_trees=grid.n_trees, random_state=mix64(grid.seed, cell_index, ROLE_FOREST)
    )
    forest.fit(x_train, y_train)
    scores = forest.predict_score(x_test)
    threshold = delta_crit(p, grid.n) if grid.problem == "er_vs_sbm" else beta_crit(p)
    result = CellResult(
        problem=grid.problem,
        method=grid.method,
        n=grid.n,
        p=p,
        secondary=secondary,
        threshold=threshold,
        auc=auc(scores, y_test),
        n_train=2 * n_train,
        n_test=2 * (gpc - n_train),
        seed=grid.seed,
        wall_ms=(time.perf_counter() - t0) * 1000.0,
    )
    if return_embeddings:
        return result, (x_test, y_test, scores)
    return result


def run_grid(grid: ExperimentGrid, jobs: int | None = None) -> list[CellResult]:
    """One CellResult per (p, secondary) pair, row-major over the grid.

    A failing cell is reported with auc=NaN and its error message; the
    remaining cells still run.
    """
    results = []
    cell_index = 0
    for p in grid.p_values:
        for secondary in grid.secondary_values:
            try:
                results.append(run_cell(grid, p, secondary, cell_index, jobs))
            except Exception as exc:  # noqa: BLE001 - cell isolation is the contract
                threshold = (
                    delta_crit(p, grid.n)
                    if grid.problem == "er_vs_sbm"
                    else beta_crit(p)
                )
                results.append(
                    CellResult(
                        problem=grid.problem,
                        method=grid.method,
                        n=grid.n,
                        p=p,
                        secondary=secondary,
                        threshold=threshold,
                        auc=float("nan"),
                        n_train=0,
                        n_test=0,
                        seed=grid.seed,
                        wall_ms=0.0,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
            cell_index += 1
    return results


def write_results_csv(results, path) -> None:
    with open(path, "w") as fh:
        fh.write(RESULTS_CSV_HEADER + "\n")
        for r in results:
            fh.write(r.csv_row() + "\n")


def write_pca_csv(rows, path) -> None:
    """rows: iterable of (graph_id, class, param, x, y)."""
    with open(path, "w") as fh:
        fh.write(PCA_CSV_HEADER + "\n")
        for graph_id, cls, param, xx, yy in rows:
            fh.write(f"{graph_id},{cls},{_fmt(float(param))},{_fmt(xx)},{_fmt(yy)}\n")


def pca_2d(embeddings) -> np.ndarray:
    """Project onto the top-2 eigenvectors of the sample covariance.

    Sign convention: each component's largest-magnitude coordinate is
    positive. All-identical input projects to zeros.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ValueError("pca_2d requires at least 3 vectors")
    if x.shape[1] < 2:
        raise ValueError("pca_2d requires dimension >= 2")
    if not np.isfinite(x).all():
        raise ValueError("pca_2d requires finite input")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (x.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    comps = eigvecs[:, [-1, -2]]
    for c in range(2):
        peak = np.argmax(np.abs(comps[:, c]))
        if comps[peak, c] < 0:
            comps[:, c] = -comps[:, c]
    return centered @ comps


def load_grid_config(path) -> ExperimentGrid:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return ExperimentGrid.from_json(payload)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from exc
