"""Pixel-table ingestion and the preprocessing chain.

The input is a flat delimiter-separated table with header
``patch_id,blue,green,red,nir,label,is_margin``: one row per pixel, label
1/-1 (or 1/0, with 0 mapped to -1) for cloud/clear, ``is_margin`` 1 for
non-physical scene-margin pixels. Patches are filtered by fill and
cloudiness, pixels are sampled into balanced train/test splits, and
features go through PCA followed by train-fitted min-max scaling into
[0, 1] (the embedding circuits require the unit interval; test values
outside the fitted range are clamped and counted).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from importlib import resources

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DegenerateError, ParseError, SamplingError, SelectionError
from .validation import as_feature_array

logger = logging.getLogger(__name__)

BANDS = ("blue", "green", "red", "nir")
COLUMNS = ("patch_id", *BANDS, "label", "is_margin")


def bundled_fixture_path() -> str:
    """Path of the synthetic two-blob pixel table shipped with the package."""
    return str(resources.files("qksvm").joinpath("fixtures/two_blobs.csv"))


@dataclass
class PixelTable:
    """Column-oriented pixel records: ids, band features, labels, margins."""

    patch_ids: np.ndarray  # (n,) str
    features: np.ndarray  # (n, 4) float64, band order BANDS
    labels: np.ndarray  # (n,) int64 in {-1, +1}
    is_margin: np.ndarray  # (n,) bool

    def __len__(self):
        return self.features.shape[0]

    def take(self, indices) -> "PixelTable":
        indices = np.asarray(indices)
        return PixelTable(
            self.patch_ids[indices],
            self.features[indices],
            self.labels[indices],
            self.is_margin[indices],
        )

    def restrict_to_patches(self, patch_ids) -> "PixelTable":
        return self.take(np.flatnonzero(np.isin(self.patch_ids, list(patch_ids))))


@dataclass(frozen=True)
class PatchStats:
    """Per-patch ratios used for training-data selection."""

    patch_id: str
    cloudiness: float  # cloud pixels / physical pixels
    fill: float  # physical pixels / all pixels
    pixel_count: int


@dataclass(frozen=True)
class SplitSpec:
    """Train/test sampling request."""

    n_train: int = 800
    n_test: int = 200
    seed: int = 0
    balanced: bool = True

    def __post_init__(self):
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("n_train and n_test must be >= 1")
        if self.balanced and (self.n_train % 2 or self.n_test % 2):
            raise ValueError(
                "balanced sampling needs even n_train and n_test, got "
                f"{self.n_train}/{self.n_test}"
            )


def _parse_label(token: str) -> int:
    if token in ("1", "+1"):
        return 1
    if token in ("-1", "0"):
        return -1
    raise ValueError(f"label must be 1, -1 or 0, got {token!r}")


def _parse_margin(token: str) -> bool:
    if token == "0":
        return False
    if token == "1":
        return True
    raise ValueError(f"is_margin must be 0 or 1, got {token!r}")


def load_pixels(path) -> PixelTable:
    """Parse a pixel table; malformed rows abort with their line number."""
    patch_ids, bands, labels, margins = [], [], [], []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ParseError("missing header row", path=path)
        if set(reader.fieldnames) != set(COLUMNS):
            raise ParseError(
                f"header must contain exactly {','.join(COLUMNS)}, got "
                f"{','.join(reader.fieldnames)}",
                path=path,
            )
        for row in reader:
            line = reader.line_num
            try:
                if None in row.values() or None in row:
                    raise ValueError(
                        f"expected {len(COLUMNS)} fields"
                    )
                patch = row["patch_id"].strip()
                if not patch:
                    raise ValueError("empty patch_id")
                values = []
                for band in BANDS:
                    value = float(row[band])
                    if not np.isfinite(value) or value < 0.0:
                        raise ValueError(
                            f"{band} must be a finite non-negative number, "
                            f"got {row[band]!r}"
                        )
                    values.append(value)
                labels.append(_parse_label(row["label"].strip()))
                margins.append(_parse_margin(row["is_margin"].strip()))
                patch_ids.append(patch)
                bands.append(values)
            except ValueError as exc:
                raise ParseError(str(exc), path=path, line=line) from exc
    return PixelTable(
        np.asarray(patch_ids, dtype=object),
        np.asarray(bands, dtype=np.float64).reshape(-1, len(BANDS)),
        np.asarray(labels, dtype=np.int64),
        np.asarray(margins, dtype=bool),
    )


def patch_stats(table: PixelTable) -> list[PatchStats]:
    """Fill and cloudiness per patch; all-margin patches are dropped."""
    if len(table) == 0:
        raise ValueError("pixel table is empty")
    stats = []
    for patch in np.unique(table.patch_ids):
        mask = table.patch_ids == patch
        total = int(mask.sum())
        physical = mask & ~table.is_margin
        n_physical = int(physical.sum())
        if n_physical == 0:
            logger.warning(
                "patch %s has no physical pixels; cloudiness undefined, skipping",
                patch,
            )
            continue
        n_cloud = int(np.sum(table.labels[physical] == 1))
        stats.append(
            PatchStats(
                patch_id=str(patch),
                cloudiness=n_cloud / n_physical,
                fill=n_physical / total,
                pixel_count=total,
            )
        )
    return stats


def select_patches(stats, min_cloudiness=0.40, max_cloudiness=0.60) -> list[str]:
    """Patches with full fill and cloudiness within the inclusive band."""
    selected = [
        s.patch_id
        for s in stats
        if s.fill == 1.0 and min_cloudiness <= s.cloudiness <= max_cloudiness
    ]
    if not selected:
        raise SelectionError(
            "no patch passed the filters (fill = 100%, cloudiness in "
            f"[{min_cloudiness:.0%}, {max_cloudiness:.0%}]); relax the bounds "
            "or check the table"
        )
    return selected


def sample_split(table: PixelTable, spec: SplitSpec) -> tuple[PixelTable, PixelTable]:
    """Draw disjoint train/test pixel sets; margin pixels are never sampled.

    Balanced mode draws half of each set from each class. Deterministic for
    a fixed ``spec.seed``.
    """
    physical = np.flatnonzero(~table.is_margin)
    rng = np.random.default_rng(spec.seed)
    if spec.balanced:
        train_parts, test_parts = [], []
        for label in (1, -1):
            pool = physical[table.labels[physical] == label]
            need = spec.n_train // 2 + spec.n_test // 2
            if pool.shape[0] < need:
                raise SamplingError(
                    f"class {label:+d} has {pool.shape[0]} pixels, "
                    f"need {need} (shortfall {need - pool.shape[0]})"
                )
            perm = rng.permutation(pool)
            train_parts.append(perm[: spec.n_train // 2])
            test_parts.append(perm[spec.n_train // 2 : need])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)
    else:
        need = spec.n_train + spec.n_test
        if physical.shape[0] < need:
            raise SamplingError(
                f"pool has {physical.shape[0]} physical pixels, need {need} "
                f"(shortfall {need - physical.shape[0]})"
            )
        perm = rng.permutation(physical)
        train_idx = perm[: spec.n_train]
        test_idx = perm[spec.n_train : need]
    return table.take(train_idx), table.take(test_idx)


# ---------------------------------------------------------------------------
# feature scaling


def fit_minmax(X) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension min and max of the fit set."""
    X = as_feature_array(X)
    if X.shape[0] < 1:
        raise ValueError("cannot fit min-max on an empty set")
    mins = X.min(axis=0)
    maxs = X.max(axis=0)
    flat = np.flatnonzero(maxs - mins <= 0.0)
    if flat.size:
        raise DegenerateError(
            f"feature dimension(s) {flat.tolist()} are constant on the fit set"
        )
    return mins, maxs


def _scale_unit(X, mins, maxs) -> tuple[np.ndarray, int]:
    scaled = (X - mins) / (maxs - mins)
    n_clamped = int(np.sum((scaled < 0.0) | (scaled > 1.0)))
    return np.clip(scaled, 0.0, 1.0), n_clamped


def apply_minmax(X, mins, maxs) -> np.ndarray:
    """Scale into [0, 1]; out-of-range values are clamped with a logged count."""
    X = as_feature_array(X, n_features=np.asarray(mins).shape[0])
    scaled, n_clamped = _scale_unit(X, np.asarray(mins), np.asarray(maxs))
    if n_clamped:
        logger.info("min-max scaling clamped %d value(s) into [0, 1]", n_clamped)
    return scaled


class UnitIntervalScaler(BaseEstimator, TransformerMixin):
    """Train-fitted min-max scaler onto [0, 1] with clamp accounting."""

    def fit(self, X, y=None):
        self.min_, self.max_ = fit_minmax(X)
        self.clamped_count_ = 0
        return self

    def transform(self, X) -> np.ndarray:
        X = as_feature_array(X, n_features=self.min_.shape[0])
        scaled, n_clamped = _scale_unit(X, self.min_, self.max_)
        if n_clamped:
            logger.info(
                "min-max scaling clamped %d value(s) into [0, 1]", n_clamped
            )
        self.clamped_count_ += n_clamped
        return scaled


# ---------------------------------------------------------------------------
# principal component analysis


@dataclass(frozen=True)
class PcaModel:
    """Mean vector, orthonormal component rows, leading eigenvalues."""

    mean: np.ndarray
    components: np.ndarray  # (k, m)
    explained_variance: np.ndarray  # (k,) non-increasing


def pca_fit(X, k: int) -> PcaModel:
    """Top-k eigenvectors of the sample covariance (N-1 denominator).

    Component signs are fixed so each row's largest-magnitude entry is
    non-negative, keeping transforms reproducible across runs.
    """
    X = as_feature_array(X)
    n, m = X.shape
    if n < 2:
        raise ValueError(f"PCA needs at least 2 rows, got {n}")
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}], got {k}")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:k]
    components = eigenvectors[:, order].T.copy()
    for row in components:
        peak = np.argmax(np.abs(row))
        if row[peak] < 0.0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=np.maximum(eigenvalues[order], 0.0),
    )


def pca_transform(model: PcaModel, X) -> np.ndarray:
    X = as_feature_array(X, n_features=model.mean.shape[0])
    return (X - model.mean) @ model.components.T


class PrincipalComponents(BaseEstimator, TransformerMixin):
    """PCA projection onto the top ``n_components`` covariance eigenvectors."""

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X, y=None):
        model = pca_fit(X, self.n_components)
        self.mean_ = model.mean
        self.components_ = model.components
        self.explained_variance_ = model.explained_variance
        return self

    def transform(self, X) -> np.ndarray:
        return pca_transform(self._model(), X)

    def _model(self) -> PcaModel:
        return PcaModel(self.mean_, self.components_, self.explained_variance_)


# ---------------------------------------------------------------------------
# preprocessing sidecar


def preprocess_to_text(pca: PcaModel, mins, maxs) -> str:
    """Serialize the fitted PCA + min-max chain; floats round-trip exactly."""

    def fmt(vec):
        return " ".join(f"{v:.17g}" for v in np.asarray(vec))

    lines = [f"pca_mean {fmt(pca.mean)}"]
    for row in pca.components:
        lines.append(f"pca_component {fmt(row)}")
    lines.append(f"pca_variance {fmt(pca.explained_variance)}")
    lines.append(f"minmax_min {fmt(mins)}")
    lines.append(f"minmax_max {fmt(maxs)}")
    return "\n".join(lines) + "\n"


def preprocess_from_text(text: str) -> tuple[PcaModel, np.ndarray, np.ndarray]:
    mean = None
    components = []
    variance = None
    mins = None
    maxs = None
    known = {"pca_mean", "pca_component", "pca_variance", "minmax_min", "minmax_max"}
    for line in text.strip().splitlines():
        key, _, rest = line.partition(" ")
        if key not in known:
            # tolerated so the sidecar can share a file with the SVM record
            continue
        values = np.array([float(tok) for tok in rest.split()])
        if key == "pca_mean":
            mean = values
        elif key == "pca_component":
            components.append(values)
        elif key == "pca_variance":
            variance = values
        elif key == "minmax_min":
            mins = values
        elif key == "minmax_max":
            maxs = values
    if mean is None or not components or variance is None or mins is None or maxs is None:
        raise ValueError("incomplete preprocessing sidecar")
    return PcaModel(mean, np.vstack(components), variance), mins, maxs


# ---------------------------------------------------------------------------
# synthetic surrogate data


def make_blob_table(
    n_pixels: int = 2400,
    n_patches: int = 2,
    seed: int = 7,
    separation: float = 5.0,
    scale: float = 10.0,
    patch_gain: float = 2.2,
) -> PixelTable:
    """Two Gaussian intensity blobs shaped like a pixel table.

    Class +1 ("cloud") and class -1 ("clear") blobs are ``separation``
    standard deviations apart in the 4-band space, split evenly over
    ``n_patches`` fully-filled patches with ~50% cloudiness each, so the
    whole table passes the patch filters. Each successive patch is brighter
    by the multiplicative ``patch_gain`` (scenes under different
    illumination), which spreads the pooled intensity range the way real
    multi-scene pixel pools do.
    """
    if n_pixels < 2 * n_patches:
        raise ValueError("need at least two pixels per patch")
    rng = np.random.default_rng(seed)
    n_cloud = n_pixels // 2
    direction = np.array([0.55, 0.45, 0.5, 0.5])
    direction /= np.linalg.norm(direction)
    base = np.array([90.0, 85.0, 80.0, 95.0])
    offset = 0.5 * separation * scale * direction
    labels = np.concatenate(
        [np.ones(n_cloud, dtype=np.int64), -np.ones(n_pixels - n_cloud, dtype=np.int64)]
    )
    means = np.where(labels[:, None] == 1, base + offset, base - offset)
    features = np.maximum(rng.normal(means, scale), 0.0)
    # round-robin patches within each class keeps every patch ~50% cloudy
    patch_of = np.concatenate(
        [np.arange(n_cloud) % n_patches, np.arange(n_pixels - n_cloud) % n_patches]
    )
    features *= (patch_gain ** patch_of)[:, None]
    order = rng.permutation(n_pixels)
    return PixelTable(
        patch_ids=np.array(
            [f"patch_{p:03d}" for p in patch_of[order]], dtype=object
        ),
        features=features[order],
        labels=labels[order],
        is_margin=np.zeros(n_pixels, dtype=bool),
    )


def write_pixel_table(table: PixelTable, path) -> None:
    """Write a table in the exact on-disk pixel format."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(COLUMNS)
        for i in range(len(table)):
            writer.writerow(
                [
                    table.patch_ids[i],
                    *(f"{v:.12g}" for v in table.features[i]),
                    int(table.labels[i]),
                    int(table.is_margin[i]),
                ]
            )
