"""Command-line front end: gen / embed / train-dict / classify / sweep / pca.

Every command that writes output also writes a manifest (JSON) recording the
full parameter set, seed, version, and output paths, sufficient to reproduce
the run byte-for-byte. Exit codes: 0 success, 2 config error, 3 generation
error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .embedding import embed_sc, embed_walk2vec, subsample_features
from .experiments import (
    beta_crit,
    delta_crit,
    load_grid_config,
    pca_2d,
    run_cell,
    write_pca_csv,
    write_results_csv,
)
from .forest import RandomForest, auc
from .generators import GenerationError, ModelParams, sbm_params_from
from .graph import read_edge_list, write_edge_list
from .parallel import parallel_map, resolve_jobs
from .seeding import mix64
from .sparse_coding import dict_learn, load_dictionary, save_dictionary
from .topo import topo_features
from .walks import feature_dim, node_walk_features

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GENERATION = 3
EXIT_NUMERIC = 4


@dataclass
class RunManifest:
    command: str
    argv: list
    params: dict
    seed: int | None
    version: str
    outputs: list
    started_at: str
    finished_at: str = ""

    def write(self, path: Path) -> None:
        self.finished_at = _now()
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _start_manifest(command: str, args: argparse.Namespace, seed=None) -> RunManifest:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    return RunManifest(
        command=command,
        argv=sys.argv[1:],
        params=params,
        seed=seed,
        version=__version__,
        outputs=[],
        started_at=_now(),
    )


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def _cmd_gen(args) -> int:
    manifest = _start_manifest("gen", args, seed=args.seed)
    if args.model == "er":
        params = ModelParams("er", args.n, p=args.p)
    elif args.model == "sbm":
        if args.delta is not None:
            if args.p is None:
                raise CliError("--delta requires --p (density)")
            p_in, p_out = sbm_params_from(args.p, args.delta)
        elif args.p_in is not None and args.p_out is not None:
            p_in, p_out = args.p_in, args.p_out
        else:
            raise CliError("sbm needs either --p with --delta, or --p-in and --p-out")
        params = ModelParams("sbm", args.n, p_in=p_in, p_out=p_out)
        manifest.params["p_in"], manifest.params["p_out"] = p_in, p_out
    else:
        if args.k is None:
            raise CliError("clique model requires --k")
        params = ModelParams("clique", args.n, p=args.p, k=args.k)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i in range(args.count):
        g = params.generate(mix64(args.seed, i))
        path = out_dir / f"graph_{i:04d}.txt"
        write_edge_list(g, path)
        files.append({"file": path.name, "instance": i, "instance_seed": mix64(args.seed, i)})
    manifest.outputs = [f["file"] for f in files]
    manifest.params["instances"] = files
    manifest.write(out_dir / "manifest.json")
    print(f"wrote {args.count} graphs to {out_dir}")
    return EXIT_OK


def _read_graphs(paths) -> list:
    graphs = []
    for p in paths:
        if not Path(p).exists():
            raise CliError(f"input file not found: {p}")
        graphs.append((Path(p).stem, read_edge_list(p)))
    if not graphs:
        raise CliError("no input graphs given")
    return graphs


def _embed_w2v_task(args):
    g, tau, metric = args
    return embed_walk2vec(g, tau, metric)


def _embed_sc_task(args):
    g, dictionary, tau, pooling, metric = args
    return embed_sc(g, dictionary, tau, pooling, metric)


def _embed_topo_task(g):
    return topo_features(g)


def _cmd_embed(args) -> int:
    manifest = _start_manifest("embed", args)
    named = _read_graphs(args.inputs)
    graphs = [g for _, g in named]
    jobs = resolve_jobs(args.jobs)
    if args.method == "walk2vec":
        rows = parallel_map(
            _embed_w2v_task, [(g, args.tau, args.metric) for g in graphs], jobs
        )
    elif args.method == "sc":
        if not args.dict:
            raise CliError("--method sc requires --dict DICTIONARY_FILE")
        dictionary = load_dictionary(args.dict)
        if dictionary.dim != feature_dim(args.tau):
            raise CliError(
                f"dictionary dimension {dictionary.dim} does not match --tau {args.tau} "
                f"(feature length {feature_dim(args.tau)})"
            )
        rows = parallel_map(
            _embed_sc_task,
            [(g, dictionary, args.tau, args.pool, args.metric) for g in graphs],
            jobs,
        )
    else:
        rows = parallel_map(_embed_topo_task, graphs, jobs)
    dim = len(rows[0])
    out = Path(args.out)
    with open(out, "w") as fh:
        cols = ["graph_id"] + (["label"] if args.label is not None else [])
        fh.write(",".join(cols + [f"e{i}" for i in range(dim)]) + "\n")
        for (gid, _), row in zip(named, rows):
            prefix = [gid] + ([str(args.label)] if args.label is not None else [])
            fh.write(",".join(prefix + [f"{v:.17g}" for v in row]) + "\n")
    manifest.outputs = [str(out)]
    manifest.write(out.with_suffix(out.suffix + ".manifest.json"))
    print(f"wrote {len(rows)} embeddings ({dim} columns) to {out}")
    return EXIT_OK


def _features_task(args):
    g, tau, metric = args
    return node_walk_features(g, tau, metric)


def _cmd_train_dict(args) -> int:
    manifest = _start_manifest("train-dict", args, seed=args.seed)
    named = _read_graphs(args.inputs)
    jobs = resolve_jobs(args.jobs)
    feats = parallel_map(
        _features_task, [(g, args.tau, args.metric) for _, g in named], jobs
    )
    corpus = subsample_features(feats, args.max_features, mix64(args.seed, 0xD1C7))
    dictionary = dict_learn(
        corpus,
        n_atoms=args.atoms,
        lambda1=args.lambda1,
        epochs=args.epochs,
        seed=mix64(args.seed, 0x5EED),
        batch_size=args.batch_size,
    )
    save_dictionary(dictionary, args.out)
    manifest.outputs = [str(args.out)]
    manifest.params["heldout_objectives"] = dictionary.heldout_objectives
    manifest.write(Path(args.out).with_suffix(".manifest.json"))
    print(
        f"trained dictionary {dictionary.dim}x{dictionary.n_atoms} "
        f"(heldout objective {dictionary.heldout_objectives[-1]:.6g}) -> {args.out}"
    )
    return EXIT_OK


def _read_embeddings_csv(path, need_label: bool):
    if not Path(path).exists():
        raise CliError(f"embeddings file not found: {path}")
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        has_label = "label" in header
        if need_label and not has_label:
            raise CliError(f"{path}: a 'label' column is required here")
        first_feat = header.index("label") + 1 if has_label else 1
        ids, labels, rows = [], [], []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(header):
                raise CliError(f"{path}: row has {len(parts)} fields, expected {len(header)}")
            ids.append(parts[0])
            labels.append(int(parts[first_feat - 1]) if has_label else None)
            rows.append([float(v) for v in parts[first_feat:]])
    return ids, labels, np.array(rows)


def _cmd_classify(args) -> int:
    manifest = _start_manifest("classify", args, seed=args.seed)
    outputs = []
    if args.model_in:
        model = RandomForest.load(args.model_in)
    else:
        if not args.train:
            raise CliError("classify needs --train embeddings or --model-in")
        _, labels, x_train = _read_embeddings_csv(args.train, need_label=True)
        model = RandomForest(n_trees=args.trees, random_state=args.seed)
        model.fit(x_train, np.array(labels))
    if args.model_out:
        model.save(args.model_out)
        outputs.append(str(args.model_out))
    if args.test:
        ids, labels, x_test = _read_embeddings_csv(args.test, need_label=False)
        scores = model.predict_score(x_test)
        if args.scores_out:
            with open(args.scores_out, "w") as fh:
                fh.write("graph_id,score\n")
                for gid, s in zip(ids, scores):
                    fh.write(f"{gid},{s:.17g}\n")
            outputs.append(str(args.scores_out))
        if all(l is not None for l in labels):
            print(f"test AUC: {auc(scores, np.array(labels)):.6f}")
    if outputs:
        manifest.outputs = outputs
        manifest.write(Path(outputs[0]).with_suffix(".manifest.json"))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    manifest = _start_manifest("sweep", args)
    grid = load_grid_config(args.config)
    if args.threshold_only:
        print("p,secondary,threshold")
        for p in grid.p_values:
            for s in grid.secondary_values:
                thr = delta_crit(p, grid.n) if grid.problem == "er_vs_sbm" else beta_crit(p)
                print(f"{p:.17g},{s:.17g},{thr:.17g}")
        return EXIT_OK
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = resolve_jobs(args.jobs)
    results = []
    pca_rows_raw = []
    cell_index = 0
    failures = []
    for p in grid.p_values:
        for secondary in grid.secondary_values:
            try:
                result, (x_test, y_test, _) = run_cell(
                    grid, p, secondary, cell_index, jobs, return_embeddings=True
                )
                results.append(result)
                for i, (row, cls) in enumerate(zip(x_test, y_test)):
                    gid = f"cell{cell_index}_c{cls}_{i:04d}"
                    pca_rows_raw.append((gid, int(cls), secondary, row))
            except Exception as exc:  # keep sweeping; report at the end
                failures.append((p, secondary, exc))
                print(f"cell (p={p}, secondary={secondary}) failed: {exc}", file=sys.stderr)
            cell_index += 1
    results_path = out_dir / "results.csv"
    write_results_csv(results, results_path)
    outputs = [str(results_path)]
    if pca_rows_raw:
        coords = pca_2d(np.array([r[3] for r in pca_rows_raw]))
        pca_path = out_dir / "pca.csv"
        write_pca_csv(
            [
                (gid, cls, param, float(cx), float(cy))
                for (gid, cls, param, _), (cx, cy) in zip(pca_rows_raw, coords)
            ],
            pca_path,
        )
        outputs.append(str(pca_path))
    manifest.outputs = outputs
    manifest.params["grid"] = grid.to_json()
    manifest.write(out_dir / "manifest.json")
    print(f"wrote {len(results)} cells to {results_path}")
    if failures:
        gen_fail = any(isinstance(e, GenerationError) for _, _, e in failures)
        return EXIT_GENERATION if gen_fail else EXIT_NUMERIC
    return EXIT_OK


def _cmd_pca(args) -> int:
    manifest = _start_manifest("pca", args)
    ids, labels, x = _read_embeddings_csv(args.embeddings, need_label=False)
    coords = pca_2d(x)
    rows = [
        (gid, lab if lab is not None else 0, args.param, float(cx), float(cy))
        for gid, lab, (cx, cy) in zip(ids, labels, coords)
    ]
    write_pca_csv(rows, args.out)
    manifest.outputs = [str(args.out)]
    manifest.write(Path(args.out).with_suffix(".manifest.json"))
    print(f"wrote {len(rows)} projected points to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="walk2vec",
        description="Random-walk graph embeddings and model-selection experiments",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate seeded graphs as edge-list files")
    gen.add_argument("--model", required=True, choices=["er", "sbm", "clique"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, help="edge probability (density for sbm+delta)")
    gen.add_argument("--delta", type=float, help="sbm community strength p_in - p_out")
    gen.add_argument("--p-in", type=float, dest="p_in")
    gen.add_argument("--p-out", type=float, dest="p_out")
    gen.add_argument("--k", type=int, help="planted clique size")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", required=True)
    gen.set_defaults(func=_cmd_gen)

    emb = sub.add_parser("embed", help="embed edge-list graphs into a CSV")
    emb.add_argument("inputs", nargs="+", help="edge-list files")
    emb.add_argument("--method", required=True, choices=["walk2vec", "sc", "topo"])
    emb.add_argument("--tau", type=int, default=15)
    emb.add_argument("--metric", choices=["distance", "similarity"], default="distance")
    emb.add_argument("--dict", help="dictionary file (required for --method sc)")
    emb.add_argument("--pool", choices=["average", "max"], default="average")
    emb.add_argument("--label", type=int, help="write this class label on every row")
    emb.add_argument("--jobs", type=int, default=None)
    emb.add_argument("--out", required=True)
    emb.set_defaults(func=_cmd_embed)

    td = sub.add_parser("train-dict", help="learn a sparse-coding dictionary")
    td.add_argument("inputs", nargs="+", help="edge-list files (training graphs)")
    td.add_argument("--tau", type=int, default=15)
    td.add_argument("--metric", choices=["distance", "similarity"], default="distance")
    td.add_argument("--atoms", type=int, default=100)
    td.add_argument("--lambda1", type=float, default=0.15)
    td.add_argument("--epochs", type=int, default=5)
    td.add_argument("--batch-size", type=int, default=256)
    td.add_argument("--max-features", type=int, default=50_000)
    td.add_argument("--seed", type=int, default=0)
    td.add_argument("--jobs", type=int, default=None)
    td.add_argument("--out", required=True)
    td.set_defaults(func=_cmd_train_dict)

    cls = sub.add_parser("classify", help="train/apply a random forest on embeddings")
    cls.add_argument("--train", help="training embeddings CSV (needs label column)")
    cls.add_argument("--test", help="test embeddings CSV")
    cls.add_argument("--trees", type=int, default=100)
    cls.add_argument("--seed", type=int, default=0)
    cls.add_argument("--scores-out")
    cls.add_argument("--model-out")
    cls.add_argument("--model-in")
    cls.set_defaults(func=_cmd_classify)

    sw = sub.add_parser("sweep", help="run an experiment grid from a JSON config")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out-dir", default="sweep_out")
    sw.add_argument("--jobs", type=int, default=None)
    sw.add_argument(
        "--threshold-only",
        action="store_true",
        help="print the theoretical threshold table and exit",
    )
    sw.set_defaults(func=_cmd_sweep)

    pc = sub.add_parser("pca", help="2-D PCA projection of an embeddings CSV")
    pc.add_argument("--embeddings", required=True)
    pc.add_argument("--param", type=float, default=0.0, help="param column value")
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=_cmd_pca)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except GenerationError as exc:
        print(f"generation error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
