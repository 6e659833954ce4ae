"""Command-line front end: fit | transform | cluster | evaluate | synth | describe.

Heavy imports happen inside the command handlers so the --threads cap can be
exported to the BLAS runtime before numpy loads.  Exit codes: 0 ok, 2 config,
3 I/O, 4 data, 5 numeric.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import CatrepError, ConfigError

_THREAD_ENV = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")

_FIT_DEFAULTS = {
    "kernels": None,  # None -> default bank
    "clusters": 2,
    "mode": "stochastic",
    "learning_rate": 1e-3,
    "batch_size": 20,
    "max_iterations": 1000,
    "delta": 1e-6,
    "seed": 0,
}


def _read_config_file(path) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{line_no}: expected key=value")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    return values


def _effective(args, defaults: dict) -> dict:
    """Merge defaults < config file < explicit flags (flags parsed with default None)."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)
        for key, raw in file_values.items():
            if key not in defaults:
                raise ConfigError(f"unknown config key {key!r}")
            current = defaults[key]
            if key == "kernels":
                merged[key] = raw
            elif isinstance(current, int):
                merged[key] = int(raw)
            elif isinstance(current, float):
                merged[key] = float(raw)
            else:
                merged[key] = raw
    for key in defaults:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


def _config_comments(command: str, settings: dict) -> list[str]:
    return [f"{command} {k}={v}" for k, v in sorted(settings.items())]


def _load_dataset(args):
    from . import dataset as ds

    return ds.load_csv(
        args.data, has_header=not getattr(args, "no_header", False), label_column=getattr(args, "label_column", None)
    )


def cmd_fit(args) -> int:
    from . import persist
    from .kernels import DEFAULT_KERNEL_TOKENS, parse_kernel_bank
    from .solver import FitConfig, fit

    settings = _effective(args, _FIT_DEFAULTS)
    tokens = settings["kernels"] if settings["kernels"] else ",".join(DEFAULT_KERNEL_TOKENS)
    funcs = parse_kernel_bank(tokens)
    config = FitConfig(
        n_clusters=settings["clusters"],
        mode=settings["mode"],
        learning_rate=settings["learning_rate"],
        batch_size=settings["batch_size"],
        max_iterations=settings["max_iterations"],
        delta=settings["delta"],
        seed=settings["seed"],
    )

    data = _load_dataset(args)
    representation, params, trace = fit(data.without_labels(), funcs, config, with_similarity=args.write_similarity)

    os.makedirs(args.out_dir, exist_ok=True)
    settings_echo = dict(settings)
    settings_echo["kernels"] = tokens
    settings_echo["data"] = args.data
    comments = _config_comments("fit", settings_echo)

    from .coupling import build_all

    bundle = persist.ModelBundle(
        attr_names=data.attr_names,
        value_dicts=data.value_dicts,
        spaces=build_all(data.without_labels()),
        funcs=funcs,
        weights=params.values,
        config=settings_echo,
    )
    persist.save_model(os.path.join(args.out_dir, "model.json"), bundle)
    persist.write_matrix_csv(os.path.join(args.out_dir, "embedding.csv"), representation.embedding, comments)
    if args.write_similarity:
        persist.write_matrix_csv(os.path.join(args.out_dir, "similarity.csv"), representation.similarity, comments)
    persist.write_table_csv(
        os.path.join(args.out_dir, "trace.csv"),
        ("iteration", "loss", "delta"),
        [(i + 1, float(l), float(d)) for i, (l, d) in enumerate(zip(trace.losses, trace.deltas))],
        comments,
    )
    if not args.no_plots:
        from .plotting import save_trace_figure

        save_trace_figure(trace.losses, os.path.join(args.out_dir, "trace.png"))
    print(
        f"fit: {data.n_objects} objects, {len(funcs)} kernels x {len(bundle.spaces)} spaces, "
        f"{len(trace)} iterations, final loss {trace.losses[-1]:.6g}, outputs in {args.out_dir}"
    )
    return 0


def cmd_transform(args) -> int:
    from . import persist

    bundle = persist.load_model(args.model)
    data = _load_dataset(args)
    embedding = persist.transform(bundle, data.without_labels())
    persist.write_matrix_csv(args.out, embedding, _config_comments("transform", {"model": args.model, "data": args.data}))
    print(f"transform: wrote {embedding.shape[0]}x{embedding.shape[1]} embedding to {args.out}")
    return 0


def cmd_cluster(args) -> int:
    from . import persist
    from .evaluation import kmeans, kmodes

    if (args.embedding is None) == (args.data is None):
        raise ConfigError("cluster needs exactly one of --embedding or --data")
    if args.embedding is not None:
        x = persist.read_matrix_csv(args.embedding)
        assignment = kmeans(x, args.k, seed=args.seed, restarts=args.restarts)
        source = args.embedding
    else:
        if args.method != "kmodes":
            raise ConfigError("--data clustering supports --method kmodes")
        data = _load_dataset(args)
        assignment = kmodes(data.without_labels(), args.k, seed=args.seed, restarts=args.restarts)
        source = args.data
    persist.write_table_csv(
        args.out,
        ("object", "cluster"),
        list(enumerate(assignment.labels.tolist())),
        _config_comments("cluster", {"source": source, "k": args.k, "seed": args.seed, "inertia": assignment.inertia}),
    )
    print(f"cluster: k={args.k}, objective {assignment.inertia:.6g}, wrote {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    import numpy as np

    from . import persist
    from .coupling import build_all
    from .evaluation import (
        EvalReport,
        coupling_matrix,
        f_score,
        goodness_curve,
        inter_indicator,
        intra_indicator,
        kmeans,
        kmodes,
        precision_at_k,
    )

    if (args.model is None) == (args.embedding is None):
        raise ConfigError("evaluate needs exactly one of --model or --embedding")
    data = _load_dataset(args)
    if data.labels is None:
        raise ConfigError("evaluate needs --label-column")

    if args.model is not None:
        bundle = persist.load_model(args.model)
        embedding = persist.transform(bundle, data.without_labels())
    else:
        embedding = persist.read_matrix_csv(args.embedding)
        if embedding.shape[0] != data.n_objects:
            raise ConfigError("embedding rows do not match the dataset")

    classes = sorted(set(data.labels))
    k_clusters = args.k if args.k else len(classes)
    seeds = [int(s) for s in np.random.SeedSequence(args.seed).generate_state(args.seeds)]

    report = EvalReport()
    scores = [f_score(kmeans(embedding, k_clusters, seed=s, restarts=args.restarts), data.labels) for s in seeds]
    report.f_scores["kmeans"] = {"median": float(np.median(scores)), "mean": float(np.mean(scores)), "scores": scores}
    if args.baseline_kmodes:
        base = [
            f_score(kmodes(data.without_labels(), k_clusters, seed=s, restarts=args.restarts), data.labels)
            for s in seeds
        ]
        report.f_scores["kmodes"] = {"median": float(np.median(base)), "mean": float(np.mean(base)), "scores": base}

    report.intra = intra_indicator(data)
    by_attr = {}
    for sp in build_all(data.without_labels()):
        by_attr.setdefault(sp.attr, []).append(coupling_matrix(sp))
    report.inter_per_attribute = tuple(inter_indicator(mats) for _, mats in sorted(by_attr.items()))

    report.goodness = goodness_curve(embedding @ embedding.T, data.labels)
    k_list = [int(k) for k in args.k_list.split(",") if k.strip()]
    report.precision = {k: precision_at_k(embedding, data.labels, k) for k in k_list}

    os.makedirs(args.out_dir, exist_ok=True)
    comments = _config_comments(
        "evaluate",
        {"data": args.data, "model": args.model, "embedding": args.embedding, "seed": args.seed, "seeds": args.seeds},
    )
    score_rows = [
        (method, s, float(v))
        for method, stats in report.f_scores.items()
        for s, v in zip(seeds, stats["scores"])
    ]
    persist.write_table_csv(os.path.join(args.out_dir, "fscores.csv"), ("method", "seed", "f_score"), score_rows, comments)
    persist.write_table_csv(
        os.path.join(args.out_dir, "goodness.csv"),
        ("epsilon", "gamma"),
        [(float(e), float(g)) for e, g in report.goodness],
        comments,
    )
    persist.write_table_csv(
        os.path.join(args.out_dir, "precision.csv"),
        ("k", "precision"),
        [(k, float(v)) for k, v in sorted(report.precision.items())],
        comments,
    )
    summary = {
        "n_objects": data.n_objects,
        "n_classes": len(classes),
        "clusters": k_clusters,
        "seeds": args.seeds,
    }
    for method, stats in report.f_scores.items():
        summary[f"fscore_{method}_median"] = stats["median"]
        summary[f"fscore_{method}_mean"] = stats["mean"]
    summary["intra_indicator"] = report.intra
    summary["inter_indicator_mean"] = float(np.mean(report.inter_per_attribute))
    for j, v in enumerate(report.inter_per_attribute):
        summary[f"inter_indicator_{data.attr_names[j]}"] = v
    persist.write_key_values(os.path.join(args.out_dir, "summary.txt"), summary, comments)
    if not args.no_plots:
        from .plotting import save_goodness_figure, save_precision_figure

        save_goodness_figure({"learned": report.goodness}, os.path.join(args.out_dir, "goodness.png"))
        save_precision_figure(report.precision, os.path.join(args.out_dir, "precision.png"))
    print(
        f"evaluate: kmeans F median {report.f_scores['kmeans']['median']:.4f}"
        + (f", kmodes F median {report.f_scores['kmodes']['median']:.4f}" if args.baseline_kmodes else "")
        + f", reports in {args.out_dir}"
    )
    return 0


def cmd_synth(args) -> int:
    from . import persist
    from .dataset import save_csv, synth_generate

    data = synth_generate(args.objects, args.attributes, args.max_values, args.clusters, args.separation, args.seed)
    save_csv(data, args.out)
    persist.write_key_values(
        args.out + ".meta",
        {
            "objects": args.objects,
            "attributes": args.attributes,
            "max_values": args.max_values,
            "clusters": args.clusters,
            "separation": args.separation,
            "seed": args.seed,
        },
    )
    print(f"synth: wrote {args.objects}x{args.attributes} dataset to {args.out}")
    return 0


def cmd_describe(args) -> int:
    from .dataset import describe

    factors = describe(_load_dataset(args))
    sys.stdout.write(factors.as_key_values())
    return 0


def _add_data_arguments(parser, label_help="column holding class labels"):
    parser.add_argument("data", help="input CSV file")
    parser.add_argument("--no-header", action="store_true", help="CSV has no header row")
    parser.add_argument("--label-column", default=None, help=label_help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catrep", description="Categorical data representation learning.")
    parser.add_argument("--threads", type=int, default=None, help="cap BLAS/OpenMP threads")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("fit", help="learn a representation from a categorical CSV")
    _add_data_arguments(p, "label column excluded from the attributes (never used for fitting)")
    p.add_argument("--config", default=None, help="key=value config file (flags override it)")
    p.add_argument("--kernels", default=None, help="comma list of gaussian:<w> / poly:<d> / linear tokens")
    p.add_argument("--clusters", type=int, default=None, help="cluster count of the objective (default 2)")
    p.add_argument("--mode", choices=("full", "stochastic"), default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--delta", type=float, default=None, help="convergence threshold on the loss change")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=".", help="directory for model/embedding/trace outputs")
    p.add_argument("--write-similarity", action="store_true", help="also materialize the similarity matrix CSV")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=cmd_fit)

    p = commands.add_parser("transform", help="embed a CSV with a trained model")
    p.add_argument("model", help="model.json from fit")
    _add_data_arguments(p)
    p.add_argument("--out", default="embedding.csv")
    p.set_defaults(handler=cmd_transform)

    p = commands.add_parser("cluster", help="cluster an embedding (k-means) or raw data (k-modes)")
    p.add_argument("--embedding", default=None, help="embedding CSV from fit/transform")
    p.add_argument("--data", default=None, help="categorical CSV for --method kmodes")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--label-column", default=None)
    p.add_argument("--method", choices=("kmeans", "kmodes"), default="kmeans")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out", default="assignment.csv")
    p.set_defaults(handler=cmd_cluster)

    p = commands.add_parser("evaluate", help="score a representation against labels")
    _add_data_arguments(p)
    p.add_argument("--model", default=None)
    p.add_argument("--embedding", default=None)
    p.add_argument("--k", type=int, default=None, help="cluster count (default: number of classes)")
    p.add_argument("--k-list", default="1,5,10", help="comma list of retrieval depths")
    p.add_argument("--seeds", type=int, default=20, help="number of clustering seeds")
    p.add_argument("--seed", type=int, default=0, help="root seed for the seed fan-out")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--baseline-kmodes", action="store_true", help="also score the Hamming/k-modes baseline")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(handler=cmd_evaluate)

    p = commands.add_parser("synth", help="generate a labeled synthetic categorical CSV")
    p.add_argument("--objects", type=int, required=True)
    p.add_argument("--attributes", type=int, required=True)
    p.add_argument("--max-values", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--separation", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_synth)

    p = commands.add_parser("describe", help="print dataset factors as key=value lines")
    _add_data_arguments(p)
    p.set_defaults(handler=cmd_describe)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("catrep: --threads must be positive", file=sys.stderr)
            return 2
        for var in _THREAD_ENV:
            os.environ[var] = str(args.threads)
    try:
        return args.handler(args)
    except CatrepError as exc:
        print(f"catrep: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"catrep: I/O error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"catrep: numeric error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
