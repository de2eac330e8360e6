"""Labeled tabular datasets: CSV I/O, validation, scaling, splitting, synthesis."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ECO_FEATURE_NAMES = ("a", "b", "c", "d", "e", "depth", "pollution", "temperature")
ECO_LABEL_COLUMN = "sediment"

# Class name pool for synthetic sediment categories; the first three are the defaults.
_CLASS_NAME_POOL = ("C", "G", "S", "T", "U", "V", "W", "X", "Y", "Z")

# Default per-class feature profiles (rows: class C, G, S; columns: ECO_FEATURE_NAMES).
# Species a-e are mean counts; depth in meters, pollution an index, temperature in deg C.
_DEFAULT_CLASS_MEANS = (
    (10.0, 7.0, 5.0, 3.0, 2.0, 28.0, 6.0, 3.4),
    (6.0, 11.0, 4.0, 7.0, 3.0, 14.0, 2.8, 4.6),
    (8.0, 9.0, 6.0, 5.0, 2.0, 21.0, 4.4, 4.0),
)
_DEFAULT_SPREADS = (2.0, 2.0, 2.0, 2.0, 2.0, 4.0, 1.1, 0.5)


@dataclass(frozen=True)
class Dataset:
    """Immutable n x p feature matrix with integer class labels and names."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise ValueError(f"features must be a nonempty 2-D matrix, got shape {features.shape}")
        if labels.shape != (features.shape[0],):
            raise ValueError(
                f"labels must be a vector of length {features.shape[0]}, got shape {labels.shape}"
            )
        if len(self.feature_names) != features.shape[1]:
            raise ValueError("feature_names length must match the number of feature columns")
        if len(self.class_names) < 2:
            raise ValueError("at least 2 class names are required")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain NaN or infinite values")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise ValueError("labels contain indices outside the class_names range")
        features.flags.writeable = False
        labels.flags.writeable = False

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices) -> "Dataset":
        """New Dataset holding the given rows (names unchanged)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names, self.class_names)


@dataclass(frozen=True)
class ScalingParams:
    """Per-column means and sample standard deviations used for standardization."""

    means: np.ndarray
    std_devs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        stds = np.asarray(self.std_devs, dtype=np.float64)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "std_devs", stds)
        if means.shape != stds.shape or means.ndim != 1:
            raise ValueError("means and std_devs must be 1-D arrays of equal length")
        if np.any(stds < 0):
            raise ValueError("std_devs must be nonnegative")

    def apply(self, features: np.ndarray) -> np.ndarray:
        """Standardize columns; zero-variance columns map to all zeros."""
        x = np.asarray(features, dtype=np.float64)
        safe = np.where(self.std_devs > 0, self.std_devs, 1.0)
        out = (x - self.means) / safe
        out[:, self.std_devs == 0] = 0.0
        return out

    def invert(self, features: np.ndarray) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        return x * self.std_devs + self.means


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint index lists covering 0..n-1 with sizes differing by at most one."""

    folds: tuple[np.ndarray, ...]

    def __post_init__(self):
        folds = tuple(np.array(f, dtype=np.int64) for f in self.folds)
        object.__setattr__(self, "folds", folds)
        if not folds:
            raise ValueError("a fold plan needs at least one fold")
        all_idx = np.concatenate(folds)
        n = all_idx.size
        if not np.array_equal(np.sort(all_idx), np.arange(n)):
            raise ValueError("folds must be disjoint and cover every index exactly once")
        sizes = [f.size for f in folds]
        if max(sizes) - min(sizes) > 1:
            raise ValueError("fold sizes must differ by at most 1")

    @property
    def n_samples(self) -> int:
        return sum(f.size for f in self.folds)

    @property
    def k(self) -> int:
        return len(self.folds)

    def train_indices(self, fold_index: int) -> np.ndarray:
        """All indices outside the given fold, in ascending order."""
        others = [f for i, f in enumerate(self.folds) if i != fold_index]
        return np.sort(np.concatenate(others))


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a seeded synthetic seabed-style dataset.

    The generated table always has the 8 feature columns in ECO_FEATURE_NAMES:
    five species counts (a-e, nonnegative integers), depth (m, positive),
    a pollution index (positive) and temperature (deg C). `separation` scales
    each class profile's offset from the across-class center, in place, so
    values > 1 pull the classes apart and values < 1 blend them.
    """

    n_per_class: int = 10
    class_count: int = 3
    class_means: tuple[tuple[float, ...], ...] | None = None
    class_spreads: tuple[tuple[float, ...], ...] | None = None
    separation: float = 1.0
    seed: int = 42


def load_csv(path, label_column: str) -> Dataset:
    """Read a headered CSV, taking `label_column` as the class and the rest as features.

    Labels are encoded by first appearance in file order; row order is preserved.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        rows = list(reader)
    header = [h.strip() for h in header]
    if header.count(label_column) == 0:
        raise ValueError(f"label column {label_column!r} not in header {header}")
    if header.count(label_column) > 1:
        raise ValueError(f"label column {label_column!r} appears more than once in the header")
    label_pos = header.index(label_column)
    feature_names = tuple(h for i, h in enumerate(header) if i != label_pos)
    if not feature_names:
        raise ValueError("no feature columns besides the label column")
    if not rows:
        raise ValueError(f"{path}: no data rows")

    features = np.empty((len(rows), len(feature_names)), dtype=np.float64)
    class_names: list[str] = []
    labels = np.empty(len(rows), dtype=np.int64)
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"row {r + 1}: expected {len(header)} cells, found {len(row)}")
        j = 0
        for i, cell in enumerate(row):
            if i == label_pos:
                name = cell.strip()
                if name not in class_names:
                    class_names.append(name)
                labels[r] = class_names.index(name)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"row {r + 1}, column {header[i]!r}: non-numeric value {cell.strip()!r}"
                ) from None
            if not math.isfinite(value):
                raise ValueError(
                    f"row {r + 1}, column {header[i]!r}: non-finite value {cell.strip()!r}"
                )
            features[r, j] = value
            j += 1
    if len(class_names) < 2:
        raise ValueError(f"need at least 2 distinct classes, found {class_names}")
    return Dataset(features, labels, feature_names, tuple(class_names))


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write the dataset as UTF-8 CSV with features at 17 significant digits."""
    if label_column in ds.feature_names:
        raise ValueError(f"label column name {label_column!r} collides with a feature name")
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [label_column])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([f"{v:.17g}" for v in row] + [ds.class_names[label]])


def standardize(ds: Dataset) -> tuple[Dataset, ScalingParams]:
    """Center each column and divide by its sample std; constant columns become zeros."""
    if ds.n_samples < 2:
        raise ValueError("standardize needs at least 2 rows")
    means = ds.features.mean(axis=0)
    stds = ds.features.std(axis=0, ddof=1)
    params = ScalingParams(means, stds)
    scaled = params.apply(ds.features)
    return Dataset(scaled, ds.labels, ds.feature_names, ds.class_names), params


def train_test_split(
    ds: Dataset, train_fraction: float, seed: int, stratified: bool = False
) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split; train size is floor(train_fraction * n), at least 1."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = ds.n_samples
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    rng = np.random.default_rng(seed)
    if stratified:
        train_parts = []
        test_parts = []
        for k in range(ds.n_classes):
            idx = np.flatnonzero(ds.labels == k)
            if idx.size == 0:
                continue
            perm = idx[rng.permutation(idx.size)]
            n_train = max(1, int(math.floor(train_fraction * idx.size)))
            train_parts.append(perm[:n_train])
            test_parts.append(perm[n_train:])
        train_idx = np.sort(np.concatenate(train_parts))
        test_idx = np.sort(np.concatenate(test_parts)) if any(
            p.size for p in test_parts
        ) else np.array([], dtype=np.int64)
    else:
        perm = rng.permutation(n)
        n_train = max(1, int(math.floor(train_fraction * n)))
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])
    if train_idx.size == 0 or test_idx.size == 0:
        raise ValueError(
            f"split with fraction {train_fraction} would leave an empty side for n={n}"
        )
    return ds.subset(train_idx), ds.subset(test_idx)


def k_fold(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle partitioned into k folds with sizes differing by at most 1."""
    n = ds.n_samples
    if not 2 <= k <= n:
        raise ValueError(f"k must satisfy 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    folds = tuple(np.sort(part) for part in np.array_split(perm, k))
    return FoldPlan(folds)


def generate_ecological(spec: SyntheticSpec) -> Dataset:
    """Synthesize a seabed-style table from seeded class-conditional normal draws."""
    if spec.n_per_class <= 0:
        raise ValueError(f"n_per_class must be positive, got {spec.n_per_class}")
    c = spec.class_count
    if not 2 <= c <= len(_CLASS_NAME_POOL):
        raise ValueError(f"class_count must be in [2, {len(_CLASS_NAME_POOL)}], got {c}")
    p = len(ECO_FEATURE_NAMES)

    if spec.class_means is None:
        if c != 3:
            raise ValueError("class_means must be given explicitly when class_count != 3")
        means = np.array(_DEFAULT_CLASS_MEANS, dtype=np.float64)
    else:
        means = np.array(spec.class_means, dtype=np.float64)
        if means.shape != (c, p):
            raise ValueError(f"class_means must have shape ({c}, {p}), got {means.shape}")
    if spec.class_spreads is None:
        spreads = np.tile(np.array(_DEFAULT_SPREADS, dtype=np.float64), (c, 1))
    else:
        spreads = np.array(spec.class_spreads, dtype=np.float64)
        if spreads.shape != (c, p):
            raise ValueError(f"class_spreads must have shape ({c}, {p}), got {spreads.shape}")
    if np.any(spreads <= 0):
        raise ValueError("class_spreads must be positive")

    center = means.mean(axis=0)
    means = center + spec.separation * (means - center)

    rng = np.random.default_rng(spec.seed)
    blocks = []
    for j in range(c):
        draw = rng.normal(means[j], spreads[j], size=(spec.n_per_class, p))
        draw[:, :5] = np.maximum(np.rint(draw[:, :5]), 0.0)  # species counts
        draw[:, 5] = np.maximum(draw[:, 5], 0.1)  # depth stays positive
        draw[:, 6] = np.maximum(draw[:, 6], 0.01)  # pollution index stays positive
        blocks.append(draw)
    features = np.vstack(blocks)
    labels = np.repeat(np.arange(c, dtype=np.int64), spec.n_per_class)
    return Dataset(features, labels, ECO_FEATURE_NAMES, _CLASS_NAME_POOL[:c])
