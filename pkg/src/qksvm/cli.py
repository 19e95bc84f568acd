"""Command-line interface.

Subcommands:
  prep    validate a pixel table (or generate a synthetic one) and print
          per-patch fill/cloudiness statistics
  kernel  dump a quantum or RBF Gram matrix for one split
  align   run the SPSA alignment loop only and emit its trace
  train   run a single split and emit model + accuracies
  bench   run the full multi-split experiment and emit the report

Exit codes: 0 success, 2 usage, 3 data problem, 4 solver non-convergence.
Values from ``--config`` (a JSON object of experiment fields) override
command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import bench as bench_mod
from .data import (
    SplitSpec,
    bundled_fixture_path,
    load_pixels,
    make_blob_table,
    patch_stats,
    preprocess_to_text,
    sample_split,
    select_patches,
    write_pixel_table,
)
from .errors import DATA_ERRORS, ConvergenceError, SelectionError
from .featuremap import FeatureMapConfig
from .hybrid import QuantumKernelSVC
from .qkernel import gram_matrix, matrix_to_text
from .svm import rbf_default_gamma, rbf_gram


class UsageError(ValueError):
    pass


def _add_data_options(parser):
    parser.add_argument(
        "--data", default=bundled_fixture_path(),
        help="pixel table path (default: bundled synthetic fixture)",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument(
        "--format", choices=("text", "json"), default="text",
        help="output format",
    )
    parser.add_argument("--out", default=None, help="write output to this file")


def _add_pipeline_options(parser):
    parser.add_argument("--train", type=int, default=800, dest="n_train",
                        help="training pixels per split")
    parser.add_argument("--test", type=int, default=200, dest="n_test",
                        help="test pixels per split")
    parser.add_argument("--unbalanced", action="store_true",
                        help="sample without class balancing")
    parser.add_argument("--depth", type=int, default=2,
                        help="feature-map repetitions")
    parser.add_argument("--pca", type=int, default=2, dest="pca_components",
                        help="PCA target dimension")
    parser.add_argument("--scale-before-pca", action="store_true",
                        help="also scale raw bands before PCA (sensitivity check)")
    parser.add_argument("--min-cloudiness", type=float, default=0.40)
    parser.add_argument("--max-cloudiness", type=float, default=0.60)
    parser.add_argument("--shots", type=int, default=None,
                        help="shots per kernel entry (default: exact mode)")
    parser.add_argument("--split-index", type=int, default=0,
                        help="which split to run for single-split commands")


def _add_spsa_options(parser):
    parser.add_argument("--spsa-iters", type=int, default=100,
                        dest="spsa_iterations")
    parser.add_argument("--spsa-a", type=float, default=0.1, dest="spsa_a")
    parser.add_argument("--spsa-c", type=float, default=0.1, dest="spsa_c")
    parser.add_argument("--spsa-alpha", type=float, default=0.602,
                        dest="spsa_alpha")
    parser.add_argument("--spsa-gamma", type=float, default=0.101,
                        dest="spsa_gamma")
    parser.add_argument("--spsa-stability", type=float, default=0.0,
                        dest="spsa_stability")
    parser.add_argument("--align-subset", type=int, default=None,
                        help="per-iteration alignment subsample size")
    parser.add_argument("--theta-init", choices=("zeros", "random"),
                        default="zeros")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qksvm",
        description="quantum-kernel SVM pipeline for pixel classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prep = sub.add_parser("prep", help="validate a pixel table, print patch stats")
    _add_data_options(p_prep)
    p_prep.add_argument("--synthetic", type=int, default=None, metavar="N",
                        help="generate N synthetic pixels instead of loading")

    p_kernel = sub.add_parser("kernel", help="dump a Gram matrix for one split")
    _add_data_options(p_kernel)
    _add_pipeline_options(p_kernel)
    p_kernel.add_argument("--n", type=int, default=None,
                          help="Gram size (first N training points)")
    p_kernel.add_argument("--kernel", choices=("quantum", "rbf"),
                          default="quantum")
    p_kernel.add_argument("--theta", default=None,
                          help="comma-separated ansatz angles (default zeros)")
    p_kernel.add_argument("--mode", choices=("exact", "shots"), default="exact",
                          help="exact fidelities or shot sampling (with --shots)")

    p_align = sub.add_parser("align", help="run SPSA alignment only, emit trace")
    _add_data_options(p_align)
    _add_pipeline_options(p_align)
    _add_spsa_options(p_align)
    p_align.add_argument("--iters", type=int, default=None,
                         help="alias for --spsa-iters")

    p_train = sub.add_parser("train", help="single split: model + accuracies")
    _add_data_options(p_train)
    _add_pipeline_options(p_train)
    _add_spsa_options(p_train)
    p_train.add_argument("--C", type=float, default=1.0, dest="svm_c")
    p_train.add_argument("--model-out", default=None,
                         help="write the fitted model record to this file")

    p_bench = sub.add_parser("bench", help="full multi-split experiment")
    _add_data_options(p_bench)
    _add_pipeline_options(p_bench)
    _add_spsa_options(p_bench)
    p_bench.add_argument("--C", type=float, default=1.0, dest="svm_c")
    p_bench.add_argument("--splits", type=int, default=20, dest="n_splits")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--timings", action="store_true",
                         help="include stage timings in the report")
    p_bench.add_argument("--config", default=None,
                         help="JSON file whose fields override the flags")
    p_bench.set_defaults(seed=None)  # bench must be given a seed explicitly
    return parser


def _experiment_config(args) -> bench_mod.ExperimentConfig:
    config = bench_mod.ExperimentConfig(
        data_path=args.data,
        seed=args.seed,
        n_splits=getattr(args, "n_splits", 1),
        n_train=args.n_train,
        n_test=args.n_test,
        balanced=not args.unbalanced,
        min_cloudiness=args.min_cloudiness,
        max_cloudiness=args.max_cloudiness,
        depth=args.depth,
        pca_components=args.pca_components,
        scale_before_pca=args.scale_before_pca,
        spsa_iterations=getattr(args, "spsa_iterations", 0),
        spsa_a=getattr(args, "spsa_a", 0.1),
        spsa_c=getattr(args, "spsa_c", 0.1),
        spsa_alpha=getattr(args, "spsa_alpha", 0.602),
        spsa_gamma=getattr(args, "spsa_gamma", 0.101),
        spsa_stability=getattr(args, "spsa_stability", 0.0),
        align_subset=getattr(args, "align_subset", None),
        theta_init=getattr(args, "theta_init", "zeros"),
        shots=args.shots,
        svm_c=getattr(args, "svm_c", 1.0),
        workers=getattr(args, "workers", 1),
    )
    config_path = getattr(args, "config", None)
    if config_path is not None:
        with open(config_path, encoding="utf-8") as handle:
            overrides = json.load(handle)
        if not isinstance(overrides, dict):
            raise UsageError("--config file must hold a JSON object")
        valid = {f.name for f in dataclasses.fields(bench_mod.ExperimentConfig)}
        unknown = set(overrides) - valid
        if unknown:
            raise UsageError(
                f"unknown config field(s): {', '.join(sorted(unknown))}"
            )
        config = dataclasses.replace(config, **overrides)
    return config


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _single_split_inputs(config, split_index):
    """Sampled and transformed features for one split."""
    table = bench_mod.prepare_pixels(config)
    sample_seed, estimator_seed = bench_mod._split_seeds(config.seed, split_index)
    train_table, test_table = sample_split(
        table,
        SplitSpec(n_train=config.n_train, n_test=config.n_test,
                  seed=sample_seed, balanced=config.balanced),
    )
    X_train, X_test, pca, scaler = bench_mod.transform_features(
        config, train_table.features, test_table.features
    )
    return (X_train, train_table.labels, X_test, test_table.labels,
            estimator_seed, pca, scaler)


def cmd_prep(args) -> int:
    if args.synthetic is not None:
        table = make_blob_table(n_pixels=args.synthetic, seed=args.seed)
        if args.out:
            write_pixel_table(table, args.out)
    else:
        table = load_pixels(args.data)
    stats = patch_stats(table)
    try:
        selected = set(select_patches(stats))
    except SelectionError:
        selected = set()
    if args.format == "json":
        payload = {
            "patches": [
                {
                    "patch_id": s.patch_id,
                    "pixel_count": s.pixel_count,
                    "fill": s.fill,
                    "cloudiness": s.cloudiness,
                    "selected": s.patch_id in selected,
                }
                for s in stats
            ],
            "n_pixels": len(table),
            "n_selected": len(selected),
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [
            f"patch {s.patch_id}: pixels={s.pixel_count} fill={s.fill:.12g} "
            f"cloudiness={s.cloudiness:.12g} "
            f"selected={'yes' if s.patch_id in selected else 'no'}"
            for s in stats
        ]
        lines.append(
            f"total: patches={len(stats)} selected={len(selected)} "
            f"pixels={len(table)}"
        )
        text = "\n".join(lines) + "\n"
    if args.synthetic is not None and args.out:
        sys.stdout.write(text)
    else:
        _emit(text, args.out)
    return 0


def cmd_kernel(args) -> int:
    if args.mode == "shots" and args.shots is None:
        raise UsageError("--mode shots requires --shots")
    config = _experiment_config(args)
    if args.mode == "exact":
        config = dataclasses.replace(config, shots=None)
    X_train, y_train, _, _, _, _, _ = _single_split_inputs(config, args.split_index)
    n = X_train.shape[0] if args.n is None else min(args.n, X_train.shape[0])
    X = X_train[:n]
    if args.kernel == "rbf":
        K = rbf_gram(X, rbf_default_gamma(X))
    else:
        theta = (
            np.zeros(2 * config.pca_components)
            if args.theta is None
            else np.array([float(tok) for tok in args.theta.split(",")])
        )
        fm = FeatureMapConfig(n_features=config.pca_components, depth=config.depth)
        K = gram_matrix(X, theta, fm, shots=config.shots, seed=config.seed)
    if args.format == "json":
        text = json.dumps(
            {"size": int(K.shape[0]),
             "entries": [[float(f"{v:.12g}") for v in row] for row in K]},
            indent=2,
        ) + "\n"
    else:
        text = matrix_to_text(K)
    _emit(text, args.out)
    return 0


def cmd_align(args) -> int:
    if args.iters is not None:
        args.spsa_iterations = args.iters
    config = _experiment_config(args)
    X_train, y_train, _, _, estimator_seed, _, _ = _single_split_inputs(
        config, args.split_index
    )
    estimator = QuantumKernelSVC(
        depth=config.depth, spsa_iterations=config.spsa_iterations,
        spsa_a=config.spsa_a, spsa_c=config.spsa_c,
        spsa_alpha=config.spsa_alpha, spsa_gamma=config.spsa_gamma,
        spsa_stability=config.spsa_stability, align_subset=config.align_subset,
        theta_init=config.theta_init, shots=config.shots,
        random_state=estimator_seed,
    )
    trace = estimator.tune(X_train, y_train)
    if args.format == "json":
        text = json.dumps(
            {
                "initial_alignment": float(f"{trace.initial_alignment:.12g}"),
                "final_alignment": float(f"{trace.final_alignment:.12g}"),
                "alignments": [float(f"{v:.12g}") for v in trace.alignments],
                "theta_final": [float(f"{v:.12g}") for v in trace.theta_final],
            },
            indent=2,
        ) + "\n"
    else:
        text = trace.to_text()
    _emit(text, args.out)
    return 0


def cmd_train(args) -> int:
    config = _experiment_config(args)
    outcome = bench_mod.execute_split(config, args.split_index)
    result = outcome.result
    if args.model_out:
        pca_model = outcome.pca._model()
        record = (
            f"theta {' '.join(f'{t:.12g}' for t in result.theta_final)}\n"
            + outcome.hybrid.svc_.to_text()
            + preprocess_to_text(pca_model, outcome.scaler.min_, outcome.scaler.max_)
        )
        with open(args.model_out, "w", encoding="utf-8") as handle:
            handle.write(record)
    if args.format == "json":
        text = json.dumps(
            {
                "split_index": result.split_index,
                "initial_alignment": result.initial_alignment,
                "final_alignment": result.final_alignment,
                "hybrid_accuracy": result.hybrid_accuracy,
                "rbf_accuracy": result.rbf_accuracy,
                "rbf_gamma": result.rbf_gamma,
            },
            indent=2,
        ) + "\n"
    else:
        text = (
            f"split {result.split_index}: "
            f"align_init={result.initial_alignment:.12g} "
            f"align_final={result.final_alignment:.12g} "
            f"hybrid_acc={result.hybrid_accuracy:.12g} "
            f"rbf_acc={result.rbf_accuracy:.12g} "
            f"rbf_gamma={result.rbf_gamma:.12g}\n"
        )
    _emit(text, args.out)
    return 0


def cmd_bench(args) -> int:
    config = _experiment_config(args)
    try:
        report = bench_mod.run_experiment(config)
    except bench_mod.SplitFailure as failure:
        if failure.partial and args.out:
            partial = bench_mod.ExperimentReport(
                config=dataclasses.asdict(config),
                splits=failure.partial,
                averages={}, deviations=None, wilcoxon=None,
            )
            _emit(bench_mod.report_to_json(partial), args.out + ".partial")
            print(
                f"partial results for {len(failure.partial)} split(s) written "
                f"to {args.out}.partial", file=sys.stderr,
            )
        raise
    if args.format == "json":
        text = bench_mod.report_to_json(report, include_timings=args.timings)
    else:
        text = bench_mod.report_to_text(report, include_timings=args.timings)
    _emit(text, args.out)
    return 0


_COMMANDS = {
    "prep": cmd_prep,
    "kernel": cmd_kernel,
    "align": cmd_align,
    "train": cmd_train,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.seed is None:
        parser.error("bench requires an explicit --seed")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 4
    except bench_mod.SplitFailure as exc:
        cause = exc.__cause__
        if isinstance(cause, ConvergenceError):
            print(f"convergence error: {exc}", file=sys.stderr)
            return 4
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
