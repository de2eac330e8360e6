"""Decision trees grown on impurity reduction, plus bagged random forests.

Single trees split on information gain (entropy, bits); forest trees split on
Gini impurity and report per-feature importance as the mean decrease in node
impurity across the ensemble.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset


def entropy(class_counts) -> float:
    """Shannon entropy in bits of a class-count vector; 0*log(0) counts as 0."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size < 1:
        raise ValueError(f"class_counts must be a nonempty vector, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("class counts must be nonnegative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("entropy of all-zero counts is undefined")
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def gini_impurity(class_counts) -> float:
    """Gini impurity 1 - sum(p_i^2) of a class-count vector."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size < 1:
        raise ValueError(f"class_counts must be a nonempty vector, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("class counts must be nonnegative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("Gini impurity of all-zero counts is undefined")
    p = counts / total
    return float(1.0 - (p * p).sum())


def conditional_entropy(partition) -> float:
    """Size-weighted mean entropy of the parts of a partition."""
    parts = [np.asarray(part, dtype=np.float64) for part in partition]
    if not parts:
        raise ValueError("partition must contain at least one part")
    sizes = np.array([part.sum() for part in parts])
    total = sizes.sum()
    if total <= 0:
        raise ValueError("every partition part is empty")
    acc = 0.0
    for part, size in zip(parts, sizes):
        if size > 0:
            acc += (size / total) * entropy(part)
    return float(acc)


def information_gain(parent, partition) -> float:
    """Entropy reduction from splitting `parent` counts into `partition`."""
    parent = np.asarray(parent, dtype=np.float64)
    merged = np.zeros_like(parent)
    for part in partition:
        merged = merged + np.asarray(part, dtype=np.float64)
    if merged.shape != parent.shape or not np.array_equal(merged, parent):
        raise ValueError("partition parts must sum exactly to the parent counts")
    return entropy(parent) - conditional_entropy(partition)


@dataclass(frozen=True)
class TreeNode:
    """Internal split node (feature/threshold/children) or leaf (class/distribution)."""

    feature_index: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    class_index: int | None = None
    class_distribution: np.ndarray | None = None

    def __post_init__(self):
        if self.class_index is not None:
            dist = np.asarray(self.class_distribution, dtype=np.float64)
            object.__setattr__(self, "class_distribution", dist)
            if abs(dist.sum() - 1.0) > 1e-12:
                raise ValueError("leaf class distribution must sum to 1")
            dist.flags.writeable = False
        elif self.feature_index is None or self.left is None or self.right is None:
            raise ValueError("internal nodes need a feature, a threshold and two children")

    @property
    def is_leaf(self) -> bool:
        return self.class_index is not None


@dataclass(frozen=True)
class DecisionTreeModel:
    root: TreeNode
    n_features: int
    n_classes: int
    criterion: str
    max_depth: int | None
    min_samples_split: int


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[DecisionTreeModel, ...]
    n_trees: int
    m_try: int
    seed: int
    importance: np.ndarray
    n_features: int
    n_classes: int

    def __post_init__(self):
        imp = np.asarray(self.importance, dtype=np.float64)
        object.__setattr__(self, "importance", imp)
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.trees) != self.n_trees or self.n_trees < 1:
            raise ValueError("forest must hold exactly n_trees fitted trees")
        if imp.shape != (self.n_features,) or np.any(imp < 0):
            raise ValueError("importance must be one nonnegative entry per feature")
        imp.flags.writeable = False


def _impurity_of_rows(counts: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of each row of a (m, c) count matrix; zero-total rows map to 0."""
    totals = counts.sum(axis=1, keepdims=True)
    safe = np.where(totals > 0, totals, 1.0)
    p = counts / safe
    if criterion == "entropy":
        terms = np.zeros_like(p)
        mask = p > 0
        terms[mask] = p[mask] * np.log2(p[mask])
        return -terms.sum(axis=1)
    if criterion == "gini":
        return 1.0 - (p * p).sum(axis=1)
    raise ValueError(f"unknown criterion {criterion!r}")


def _best_split(features, onehot, candidates, criterion):
    """Best (decrease, feature, threshold) over midpoint splits, or None.

    Ties favor the lowest feature index (candidates scanned ascending with a
    strict comparison) and then the lowest threshold (first argmax position).
    """
    n = onehot.shape[0]
    total_counts = onehot.sum(axis=0)
    parent = float(_impurity_of_rows(total_counts[None, :], criterion)[0])
    best = None
    for f in candidates:
        values = features[:, f]
        order = np.argsort(values, kind="stable")
        ordered = values[order]
        boundaries = np.flatnonzero(ordered[1:] > ordered[:-1])
        if boundaries.size == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left_counts = cum[boundaries]
        right_counts = total_counts[None, :] - left_counts
        n_left = left_counts.sum(axis=1)
        n_right = n - n_left
        children = (
            n_left * _impurity_of_rows(left_counts, criterion)
            + n_right * _impurity_of_rows(right_counts, criterion)
        ) / n
        decreases = parent - children
        i = int(np.argmax(decreases))
        if best is None or decreases[i] > best[0]:
            threshold = float((ordered[boundaries[i]] + ordered[boundaries[i] + 1]) / 2.0)
            best = (float(decreases[i]), int(f), threshold)
    return best


class _TreeBuilder:
    """Recursive grower shared by single trees and forest members."""

    def __init__(self, features, labels, n_classes, criterion, max_depth,
                 min_samples_split, m_try=None, rng=None):
        self.features = features
        self.labels = labels
        self.n_classes = n_classes
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.m_try = m_try
        self.rng = rng
        self.n_total = labels.size
        self.n_features = features.shape[1]
        self.importance = np.zeros(self.n_features)

    def grow(self) -> TreeNode:
        return self._grow(np.arange(self.n_total), depth=0)

    def _leaf(self, counts, n) -> TreeNode:
        return TreeNode(class_index=int(np.argmax(counts)), class_distribution=counts / n)

    def _grow(self, indices, depth) -> TreeNode:
        labels = self.labels[indices]
        n = indices.size
        counts = np.bincount(labels, minlength=self.n_classes).astype(np.float64)
        if (
            counts.max() == n
            or (self.max_depth is not None and depth >= self.max_depth)
            or n < self.min_samples_split
        ):
            return self._leaf(counts, n)

        features = self.features[indices]
        onehot = np.zeros((n, self.n_classes))
        onehot[np.arange(n), labels] = 1.0
        if self.m_try is not None and self.m_try < self.n_features:
            candidates = np.sort(self.rng.choice(self.n_features, self.m_try, replace=False))
            best = _best_split(features, onehot, candidates, self.criterion)
            if best is None:
                # subset had only constant columns here; widen so a splittable
                # impure node never turns into a leaf
                best = _best_split(features, onehot, range(self.n_features), self.criterion)
        else:
            best = _best_split(features, onehot, range(self.n_features), self.criterion)
        if best is None:
            return self._leaf(counts, n)

        decrease, feature, threshold = best
        self.importance[feature] += (n / self.n_total) * max(decrease, 0.0)
        go_left = features[:, feature] <= threshold
        left = self._grow(indices[go_left], depth + 1)
        right = self._grow(indices[~go_left], depth + 1)
        return TreeNode(feature_index=feature, threshold=threshold, left=left, right=right)


def fit_decision_tree(
    ds: Dataset,
    max_depth: int | None = None,
    min_samples_split: int = 2,
    criterion: str = "entropy",
) -> DecisionTreeModel:
    """Grow a binary-split tree greedily; impure nodes split until no distinct
    feature values remain, so consistent data is always fit exactly."""
    if ds.n_samples < 1:
        raise ValueError("cannot fit a tree on an empty dataset")
    if max_depth is not None and max_depth < 0:
        raise ValueError(f"max_depth must be nonnegative, got {max_depth}")
    if min_samples_split < 2:
        raise ValueError(f"min_samples_split must be at least 2, got {min_samples_split}")
    if criterion not in ("entropy", "gini"):
        raise ValueError(f"criterion must be 'entropy' or 'gini', got {criterion!r}")
    builder = _TreeBuilder(
        ds.features, ds.labels, ds.n_classes, criterion, max_depth, min_samples_split
    )
    return DecisionTreeModel(
        root=builder.grow(),
        n_features=ds.n_features,
        n_classes=ds.n_classes,
        criterion=criterion,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
    )


def predict_tree(model: DecisionTreeModel, x) -> int:
    """Route x down the tree; values equal to a threshold go left."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} feature values, got {x.size}")
    node = model.root
    while not node.is_leaf:
        node = node.left if x[node.feature_index] <= node.threshold else node.right
    return int(node.class_index)


def fit_random_forest(
    ds: Dataset,
    n_trees: int = 500,
    m_try: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
    max_depth: int | None = None,
    min_samples_split: int = 2,
) -> ForestModel:
    """Bag Gini trees on bootstrap resamples, a fresh m_try-feature subset per split.

    Per-tree randomness comes from independent children of one seed sequence,
    so results do not depend on build order. `bootstrap=False` is a test hook
    that trains every tree on the full sample.
    """
    if ds.n_samples < 1:
        raise ValueError("cannot fit a forest on an empty dataset")
    if n_trees < 1:
        raise ValueError(f"n_trees must be at least 1, got {n_trees}")
    p = ds.n_features
    if m_try is None:
        m_try = max(1, int(np.sqrt(p)))
    if not 1 <= m_try <= p:
        raise ValueError(f"m_try must be in [1, {p}], got {m_try}")

    n = ds.n_samples
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    importance = np.zeros(p)
    for t in range(n_trees):
        rng = np.random.default_rng(children[t])
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        builder = _TreeBuilder(
            ds.features[rows],
            ds.labels[rows],
            ds.n_classes,
            "gini",
            max_depth,
            min_samples_split,
            m_try=m_try,
            rng=rng,
        )
        root = builder.grow()
        importance += builder.importance
        trees.append(
            DecisionTreeModel(
                root=root,
                n_features=p,
                n_classes=ds.n_classes,
                criterion="gini",
                max_depth=max_depth,
                min_samples_split=min_samples_split,
            )
        )
    importance = np.maximum(importance / n_trees, 0.0)
    return ForestModel(
        trees=tuple(trees),
        n_trees=n_trees,
        m_try=m_try,
        seed=seed,
        importance=importance,
        n_features=p,
        n_classes=ds.n_classes,
    )


def forest_votes(model: ForestModel, x) -> np.ndarray:
    """Per-class vote counts over the forest's trees for one input."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} feature values, got {x.size}")
    votes = np.zeros(model.n_classes, dtype=np.int64)
    for tree in model.trees:
        votes[predict_tree(tree, x)] += 1
    return votes


def predict_forest(model: ForestModel, x) -> int:
    """Majority vote over the trees; ties go to the lowest class index."""
    return int(np.argmax(forest_votes(model, x)))


def forest_error_trace(model: ForestModel, train: Dataset, holdout: Dataset | None = None) -> str:
    """CSV of ensemble error rate versus tree count (majority vote over the
    first t trees): resubstitution error on `train`, plus holdout error when a
    held-out dataset is supplied."""

    def staged_errors(ds: Dataset) -> np.ndarray:
        per_tree = np.array(
            [[predict_tree(tree, x) for x in ds.features] for tree in model.trees]
        )
        tallies = np.zeros((ds.n_samples, model.n_classes), dtype=np.int64)
        errors = np.empty(model.n_trees)
        for t in range(model.n_trees):
            np.add.at(tallies, (np.arange(ds.n_samples), per_tree[t]), 1)
            staged = np.argmax(tallies, axis=1)
            errors[t] = float(np.mean(staged != ds.labels))
        return errors

    resub = staged_errors(train)
    held = staged_errors(holdout) if holdout is not None else None
    out = io.StringIO()
    writer = csv.writer(out)
    header = ["n_trees", "resubstitution_error"] + (
        ["holdout_error"] if held is not None else []
    )
    writer.writerow(header)
    for t in range(model.n_trees):
        row = [t + 1, f"{resub[t]:.10g}"]
        if held is not None:
            row.append(f"{held[t]:.10g}")
        writer.writerow(row)
    return out.getvalue()
