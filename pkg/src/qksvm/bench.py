"""End-to-end experiment harness over repeated train/test splits.

Each split samples balanced pixels from the filtered patches, reduces the
four bands with PCA, scales into the unit interval, tunes and trains the
quantum-kernel SVM, trains the RBF baseline on the same features, and
scores both on held-out pixels. Split seeds derive from (master seed,
split index), so results are independent of execution order and of how
many splits run.

Reports carry per-split alignments and accuracies, their mean/deviation
rows, and a Wilcoxon signed-rank comparison of the paired accuracies. All
serialized floats use 12 significant digits; stage timings are kept out of
the default serialization so reports are byte-reproducible.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import (
    PixelTable,
    SplitSpec,
    UnitIntervalScaler,
    PrincipalComponents,
    load_pixels,
    patch_stats,
    sample_split,
    select_patches,
)
from .errors import DegenerateError
from .hybrid import QuantumKernelSVC
from .stats import summarize, wilcoxon_signed_rank
from .svm import KernelSVC, accuracy, rbf_default_gamma

METRICS = ("initial_alignment", "final_alignment", "hybrid_accuracy", "rbf_accuracy")


@dataclass
class ExperimentConfig:
    """Fully resolved experiment parameters; everything a run depends on."""

    data_path: str
    seed: int = 0
    n_splits: int = 20
    n_train: int = 800
    n_test: int = 200
    balanced: bool = True
    min_cloudiness: float = 0.40
    max_cloudiness: float = 0.60
    depth: int = 2
    pca_components: int = 2
    scale_before_pca: bool = False
    spsa_iterations: int = 100
    spsa_a: float = 0.1
    spsa_c: float = 0.1
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101
    spsa_stability: float = 0.0
    align_subset: int | None = None
    theta_init: str = "zeros"
    shots: int | None = None
    svm_c: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if self.n_splits < 1:
            raise ValueError(f"n_splits must be >= 1, got {self.n_splits}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass
class SplitResult:
    """One split's alignments, accuracies, tuned angles and timings."""

    split_index: int
    initial_alignment: float
    final_alignment: float
    hybrid_accuracy: float
    rbf_accuracy: float
    rbf_gamma: float
    theta_final: list[float]
    stage_seconds: dict[str, float] = field(default_factory=dict)
    wall_seconds: float = 0.0


@dataclass
class ExperimentReport:
    config: dict
    splits: list[SplitResult]
    averages: dict[str, float]
    deviations: dict[str, float] | None
    wilcoxon: dict | None


class SplitFailure(RuntimeError):
    """A split aborted; carries the stage, index and completed results."""

    def __init__(self, split_index, stage, cause, partial):
        super().__init__(
            f"split {split_index} failed during {stage}: {cause}"
        )
        self.split_index = split_index
        self.stage = stage
        self.partial = partial


def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def prepare_pixels(config: ExperimentConfig) -> PixelTable:
    """Load the pixel table and keep only pixels of the selected patches."""
    table = load_pixels(config.data_path)
    stats = patch_stats(table)
    selected = select_patches(
        stats, min_cloudiness=config.min_cloudiness,
        max_cloudiness=config.max_cloudiness,
    )
    return table.restrict_to_patches(selected)


def _split_seeds(master_seed: int, split_index: int) -> tuple[int, int]:
    children = np.random.SeedSequence([int(master_seed), int(split_index)]).spawn(2)
    return (
        int(children[0].generate_state(1, dtype=np.uint64)[0]),
        int(children[1].generate_state(1, dtype=np.uint64)[0]),
    )


def transform_features(config: ExperimentConfig, train_bands, test_bands):
    """Fit the reduction/scaling chain on train bands, apply to both sets.

    Default order is PCA then unit-interval scaling; ``scale_before_pca``
    inserts an extra scaling pass before PCA for sensitivity checks (the
    final pass always runs because the embedding requires [0, 1] inputs).
    Returns (X_train, X_test, fitted PCA, fitted scaler).
    """
    if config.scale_before_pca:
        pre = UnitIntervalScaler().fit(train_bands)
        train_bands = pre.transform(train_bands)
        test_bands = pre.transform(test_bands)
    pca = PrincipalComponents(n_components=config.pca_components).fit(train_bands)
    train_reduced = pca.transform(train_bands)
    test_reduced = pca.transform(test_bands)
    scaler = UnitIntervalScaler().fit(train_reduced)
    return (
        scaler.transform(train_reduced),
        scaler.transform(test_reduced),
        pca,
        scaler,
    )


@dataclass
class SplitOutcome:
    """A split's summary plus the fitted artifacts, for model export."""

    result: SplitResult
    hybrid: QuantumKernelSVC
    baseline: KernelSVC
    pca: PrincipalComponents
    scaler: UnitIntervalScaler


def execute_split(config: ExperimentConfig, split_index: int,
                  table: PixelTable | None = None) -> SplitOutcome:
    """Execute one full split; deterministic given (config, split_index)."""
    if table is None:
        table = prepare_pixels(config)
    sample_seed, estimator_seed = _split_seeds(config.seed, split_index)
    timings = {}
    wall_start = time.perf_counter()

    tic = time.perf_counter()
    train_table, test_table = sample_split(
        table,
        SplitSpec(n_train=config.n_train, n_test=config.n_test,
                  seed=sample_seed, balanced=config.balanced),
    )
    timings["sample"] = time.perf_counter() - tic

    tic = time.perf_counter()
    X_train, X_test, pca, scaler = transform_features(
        config, train_table.features, test_table.features
    )
    y_train = train_table.labels
    y_test = test_table.labels
    timings["transform"] = time.perf_counter() - tic

    hybrid = QuantumKernelSVC(
        depth=config.depth, C=config.svm_c,
        spsa_iterations=config.spsa_iterations, spsa_a=config.spsa_a,
        spsa_c=config.spsa_c, spsa_alpha=config.spsa_alpha,
        spsa_gamma=config.spsa_gamma, spsa_stability=config.spsa_stability,
        align_subset=config.align_subset, theta_init=config.theta_init,
        shots=config.shots, random_state=estimator_seed,
    ).fit(X_train, y_train)
    timings.update(hybrid.stage_seconds_)

    tic = time.perf_counter()
    hybrid_acc = accuracy(hybrid.predict(X_test), y_test)
    timings["predict"] = time.perf_counter() - tic

    tic = time.perf_counter()
    gamma = rbf_default_gamma(X_train)
    baseline = KernelSVC(C=config.svm_c, kernel="rbf", gamma=gamma).fit(
        X_train, y_train
    )
    timings["rbf_train"] = time.perf_counter() - tic

    tic = time.perf_counter()
    rbf_acc = accuracy(baseline.predict(X_test), y_test)
    timings["rbf_predict"] = time.perf_counter() - tic

    result = SplitResult(
        split_index=split_index,
        initial_alignment=_round12(hybrid.initial_alignment_),
        final_alignment=_round12(hybrid.final_alignment_),
        hybrid_accuracy=_round12(hybrid_acc),
        rbf_accuracy=_round12(rbf_acc),
        rbf_gamma=_round12(gamma),
        theta_final=[_round12(t) for t in hybrid.theta_],
        stage_seconds=timings,
        wall_seconds=time.perf_counter() - wall_start,
    )
    return SplitOutcome(
        result=result, hybrid=hybrid, baseline=baseline, pca=pca, scaler=scaler
    )


def run_split(config: ExperimentConfig, split_index: int,
              table: PixelTable | None = None) -> SplitResult:
    """Summary-only variant of :func:`execute_split` (picklable return)."""
    return execute_split(config, split_index, table).result


def _aggregate(splits: list[SplitResult]):
    averages = {}
    deviations = None
    if len(splits) >= 2:
        deviations = {}
        for metric in METRICS:
            mean, sd = summarize([getattr(s, metric) for s in splits])
            averages[metric] = _round12(mean)
            deviations[metric] = _round12(sd)
    else:
        for metric in METRICS:
            averages[metric] = _round12(getattr(splits[0], metric))
    return averages, deviations


def _wilcoxon_block(splits: list[SplitResult]):
    if len(splits) < 2:
        return None
    hybrid = [s.hybrid_accuracy for s in splits]
    baseline = [s.rbf_accuracy for s in splits]
    try:
        result = wilcoxon_signed_rank(hybrid, baseline)
    except DegenerateError:
        return {
            "statistic": None,
            "p_value": None,
            "n_effective": 0,
            "method": "degenerate",
            "decision": "no significant difference (all paired differences zero)",
        }
    decision = (
        "significant difference"
        if result.p_value < 0.05
        else "no significant difference"
    )
    return {
        "statistic": _round12(result.statistic),
        "p_value": _round12(result.p_value),
        "n_effective": result.n_effective,
        "method": result.method,
        "decision": f"{decision} at p<0.05",
    }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run all splits and aggregate into a report.

    A failing split raises :class:`SplitFailure` carrying the results that
    completed before the failure.
    """
    table = prepare_pixels(config)
    splits: list[SplitResult] = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(run_split, config, index, table)
                for index in range(config.n_splits)
            ]
            for index, future in enumerate(futures):
                try:
                    splits.append(future.result())
                except Exception as exc:  # noqa: BLE001 - reported with context
                    raise SplitFailure(index, "worker", exc, splits) from exc
    else:
        for index in range(config.n_splits):
            try:
                splits.append(run_split(config, index, table))
            except Exception as exc:  # noqa: BLE001 - reported with context
                raise SplitFailure(index, "run_split", exc, splits) from exc

    averages, deviations = _aggregate(splits)
    return ExperimentReport(
        config=asdict(config),
        splits=splits,
        averages=averages,
        deviations=deviations,
        wilcoxon=_wilcoxon_block(splits),
    )


# ---------------------------------------------------------------------------
# report rendering


def report_to_json(report: ExperimentReport, include_timings: bool = False) -> str:
    splits = []
    for s in report.splits:
        row = {
            "split_index": s.split_index,
            "initial_alignment": s.initial_alignment,
            "final_alignment": s.final_alignment,
            "hybrid_accuracy": s.hybrid_accuracy,
            "rbf_accuracy": s.rbf_accuracy,
            "rbf_gamma": s.rbf_gamma,
            "theta_final": s.theta_final,
        }
        if include_timings:
            row["stage_seconds"] = {
                k: round(v, 6) for k, v in s.stage_seconds.items()
            }
            row["wall_seconds"] = round(s.wall_seconds, 6)
        splits.append(row)
    payload = {
        "config": report.config,
        "splits": splits,
        "averages": report.averages,
        "deviations": report.deviations,
        "wilcoxon": report.wilcoxon,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    payload = json.loads(text)
    splits = [
        SplitResult(
            split_index=row["split_index"],
            initial_alignment=row["initial_alignment"],
            final_alignment=row["final_alignment"],
            hybrid_accuracy=row["hybrid_accuracy"],
            rbf_accuracy=row["rbf_accuracy"],
            rbf_gamma=row["rbf_gamma"],
            theta_final=row["theta_final"],
            stage_seconds=row.get("stage_seconds", {}),
            wall_seconds=row.get("wall_seconds", 0.0),
        )
        for row in payload["splits"]
    ]
    return ExperimentReport(
        config=payload["config"],
        splits=splits,
        averages=payload["averages"],
        deviations=payload["deviations"],
        wilcoxon=payload["wilcoxon"],
    )


def report_to_text(report: ExperimentReport, include_timings: bool = False) -> str:
    """Table-shaped rendering: per-split rows, then average/deviation rows."""
    header = (
        f"{'split':>5}  {'align_init':>14}  {'align_final':>14}  "
        f"{'hybrid_acc':>12}  {'rbf_acc':>12}"
    )
    lines = ["quantum-kernel SVM benchmark", "", header, "-" * len(header)]
    for s in report.splits:
        lines.append(
            f"{s.split_index:>5}  {s.initial_alignment:>14.12g}  "
            f"{s.final_alignment:>14.12g}  {s.hybrid_accuracy:>12.12g}  "
            f"{s.rbf_accuracy:>12.12g}"
        )
    lines.append("-" * len(header))
    avg = report.averages
    lines.append(
        f"{'avg':>5}  {avg['initial_alignment']:>14.12g}  "
        f"{avg['final_alignment']:>14.12g}  {avg['hybrid_accuracy']:>12.12g}  "
        f"{avg['rbf_accuracy']:>12.12g}"
    )
    if report.deviations is not None:
        dev = report.deviations
        lines.append(
            f"{'sd':>5}  {dev['initial_alignment']:>14.12g}  "
            f"{dev['final_alignment']:>14.12g}  {dev['hybrid_accuracy']:>12.12g}  "
            f"{dev['rbf_accuracy']:>12.12g}"
        )
    lines.append("")
    if report.wilcoxon is None:
        lines.append("wilcoxon: skipped (needs at least 2 splits)")
    elif report.wilcoxon["method"] == "degenerate":
        lines.append(f"wilcoxon: {report.wilcoxon['decision']}")
    else:
        w = report.wilcoxon
        lines.append(
            f"wilcoxon (hybrid vs rbf accuracy): W={w['statistic']:.12g} "
            f"p={w['p_value']:.12g} n={w['n_effective']} method={w['method']}"
        )
        lines.append(f"decision: {w['decision']}")
    if include_timings:
        lines.append("")
        for s in report.splits:
            stages = " ".join(
                f"{k}={v:.3f}s" for k, v in sorted(s.stage_seconds.items())
            )
            lines.append(
                f"timings split {s.split_index}: total={s.wall_seconds:.3f}s {stages}"
            )
    lines.append("")
    lines.append("config: " + json.dumps(report.config, sort_keys=True))
    return "\n".join(lines) + "\n"
