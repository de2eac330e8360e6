"""Linear and probabilistic classifiers: Fisher discriminant analysis,
multinomial logistic regression, and Gaussian naive Bayes."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dataset import Dataset

LDA_REGULARIZATION_EPSILON = 1e-8


@dataclass(frozen=True)
class LdaModel:
    """Equal-covariance Gaussian discriminant with Fisher projection axes.

    `pooled_covariance` is stored with its diagonal regularization applied;
    every axis beta satisfies beta' C beta = 1 under that matrix.
    """

    class_means: np.ndarray
    pooled_covariance: np.ndarray
    priors: np.ndarray
    discriminant_axes: np.ndarray
    regularization_epsilon: float

    def __post_init__(self):
        for name in ("class_means", "pooled_covariance", "priors", "discriminant_axes"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            arr.flags.writeable = False
        if abs(self.priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must sum to 1")
        if not np.allclose(self.pooled_covariance, self.pooled_covariance.T):
            raise ValueError("pooled covariance must be symmetric")

    @property
    def n_classes(self) -> int:
        return self.class_means.shape[0]

    @property
    def n_features(self) -> int:
        return self.class_means.shape[1]


def fit_lda(ds: Dataset) -> LdaModel:
    """Class means, frequency priors, pooled within-class covariance and
    discriminant axes ordered by decreasing between/within separation."""
    n, p, c = ds.n_samples, ds.n_features, ds.n_classes
    if n <= c:
        raise ValueError(f"need more samples than classes, got n={n}, c={c}")
    counts = ds.class_counts()
    if counts.min() < 2:
        lacking = ds.class_names[int(np.argmin(counts))]
        raise ValueError(f"every class needs at least 2 samples, class {lacking!r} has "
                         f"{int(counts.min())}")

    means = np.empty((c, p))
    pooled = np.zeros((p, p))
    for j in range(c):
        rows = ds.features[ds.labels == j]
        means[j] = rows.mean(axis=0)
        centered = rows - means[j]
        pooled += centered.T @ centered
    pooled /= n
    if not np.all(np.isfinite(pooled)):
        raise ValueError("pooled covariance is not finite")
    ridge = LDA_REGULARIZATION_EPSILON * np.trace(pooled) / p
    if ridge <= 0:
        raise ValueError("pooled covariance has zero trace; features are all constant")
    pooled = pooled + ridge * np.eye(p)
    pooled = (pooled + pooled.T) / 2.0

    priors = counts / n
    overall = priors @ means
    between = np.zeros((p, p))
    for j in range(c):
        diff = means[j] - overall
        between += priors[j] * np.outer(diff, diff)

    # eigh normalizes the eigenvectors to v' C v = 1 and sorts ascending
    eigenvalues, vectors = scipy.linalg.eigh(between, pooled)
    order = np.argsort(eigenvalues)[::-1][: min(c - 1, p)]
    axes = vectors[:, order].T

    return LdaModel(
        class_means=means,
        pooled_covariance=pooled,
        priors=priors,
        discriminant_axes=axes,
        regularization_epsilon=LDA_REGULARIZATION_EPSILON,
    )


def lda_score(model: LdaModel, direction, class_i: int, class_j: int) -> float:
    """Separation of two classes along a direction: squared projected mean
    difference over projected pooled variance; invariant to direction scale."""
    beta = np.asarray(direction, dtype=np.float64).reshape(-1)
    if beta.size != model.n_features:
        raise ValueError(f"expected {model.n_features} direction entries, got {beta.size}")
    if not np.any(beta != 0):
        raise ValueError("direction must be nonzero")
    c = model.n_classes
    if not (0 <= class_i < c and 0 <= class_j < c):
        raise ValueError(f"class indices must be in [0, {c})")
    diff = model.class_means[class_i] - model.class_means[class_j]
    return float((beta @ diff) ** 2 / (beta @ model.pooled_covariance @ beta))


def fisher_score(model: LdaModel, direction) -> float:
    """All-class separation ratio (between-class over within-class projected
    variance); the first discriminant axis maximizes this quantity."""
    beta = np.asarray(direction, dtype=np.float64).reshape(-1)
    if beta.size != model.n_features:
        raise ValueError(f"expected {model.n_features} direction entries, got {beta.size}")
    if not np.any(beta != 0):
        raise ValueError("direction must be nonzero")
    overall = model.priors @ model.class_means
    projected = (model.class_means - overall) @ beta
    between = float((model.priors * projected**2).sum())
    return between / float(beta @ model.pooled_covariance @ beta)


def mahalanobis_sq(model: LdaModel, class_i: int, class_j: int) -> float:
    """Squared Mahalanobis distance between two class means under the pooled
    covariance metric."""
    c = model.n_classes
    if not (0 <= class_i < c and 0 <= class_j < c):
        raise ValueError(f"class indices must be in [0, {c})")
    diff = model.class_means[class_i] - model.class_means[class_j]
    return float(diff @ np.linalg.solve(model.pooled_covariance, diff))


def predict_lda(model: LdaModel, x) -> int:
    """Largest Gaussian discriminant score wins; ties go to the lowest index."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} feature values, got {x.size}")
    weights = np.linalg.solve(model.pooled_covariance, model.class_means.T)
    scores = x @ weights - 0.5 * np.sum(model.class_means.T * weights, axis=0) + np.log(
        model.priors
    )
    return int(np.argmax(scores))


def discriminant_table(model: LdaModel, feature_names) -> str:
    """CSV of axis coefficients, one row per feature, columns LD1, LD2, ..."""
    names = tuple(feature_names)
    if len(names) != model.n_features:
        raise ValueError("feature_names length must match the model's feature count")
    out = io.StringIO()
    writer = csv.writer(out)
    n_axes = model.discriminant_axes.shape[0]
    writer.writerow(["feature"] + [f"LD{i + 1}" for i in range(n_axes)])
    for f, name in enumerate(names):
        writer.writerow([name] + [f"{model.discriminant_axes[i, f]:.10g}" for i in range(n_axes)])
    return out.getvalue()


@dataclass(frozen=True)
class LogisticModel:
    """Softmax linear model; weight row j holds [intercept, coefficients] for
    class j and the last class row is pinned to zero."""

    weights: np.ndarray
    iterations: int
    final_loss: float
    loss_history: tuple[float, ...]

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "loss_history", tuple(self.loss_history))
        if weights.ndim != 2 or weights.shape[0] < 2:
            raise ValueError("weights must be a (c, p+1) matrix with c >= 2")
        if np.any(weights[-1] != 0):
            raise ValueError("the last class's weight row must be pinned to zero")
        weights.flags.writeable = False

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_features(self) -> int:
        return self.weights.shape[1] - 1


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def logistic_loss_and_gradient(weights, features, labels):
    """Mean cross-entropy and its gradient; the pinned last row's gradient is 0."""
    w = np.asarray(weights, dtype=np.float64)
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n = x.shape[0]
    xt = np.hstack([np.ones((n, 1)), x])
    probs = _softmax_rows(xt @ w.T)
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), y] = 1.0
    grad = (probs - onehot).T @ xt / n
    grad[-1] = 0.0
    return loss, grad


def fit_logistic(
    ds: Dataset,
    learning_rate: float = 0.1,
    max_iter: int = 5000,
    tolerance: float = 1e-8,
) -> LogisticModel:
    """Full-batch gradient descent from zero weights; stops when the loss
    settles (nonnegative improvement below tolerance) or at max_iter.

    Expects standardized features; the benchmark harness standardizes.
    """
    if ds.n_samples < ds.n_classes:
        raise ValueError(f"need at least as many samples as classes, got n={ds.n_samples}")
    if learning_rate <= 0 or max_iter < 0 or tolerance < 0:
        raise ValueError("learning_rate must be positive, max_iter and tolerance nonnegative")
    c, p = ds.n_classes, ds.n_features
    w = np.zeros((c, p + 1))
    history = []
    prev = None
    iterations = 0
    for it in range(max_iter):
        loss, grad = logistic_loss_and_gradient(w, ds.features, ds.labels)
        if not np.isfinite(loss):
            raise ValueError(f"training loss became non-finite at iteration {it}")
        history.append(loss)
        if prev is not None and 0.0 <= prev - loss < tolerance:
            break
        w = w - learning_rate * grad
        prev = loss
        iterations = it + 1
    final_loss, _ = logistic_loss_and_gradient(w, ds.features, ds.labels)
    return LogisticModel(
        weights=w, iterations=iterations, final_loss=float(final_loss),
        loss_history=tuple(history),
    )


def predict_logistic_proba(model: LogisticModel, x) -> np.ndarray:
    """Class probabilities for one input; they sum to 1."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} feature values, got {x.size}")
    scores = model.weights @ np.concatenate([[1.0], x])
    e = np.exp(scores - scores.max())
    probs = e / e.sum()
    return probs / probs.sum()


def predict_logistic(model: LogisticModel, x) -> int:
    return int(np.argmax(predict_logistic_proba(model, x)))


@dataclass(frozen=True)
class NaiveBayesModel:
    """Frequency priors plus one Gaussian per (class, feature) pair."""

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    variance_floor: np.ndarray

    def __post_init__(self):
        for name in ("priors", "means", "variances", "variance_floor"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            arr.flags.writeable = False
        if abs(self.priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must sum to 1")
        if np.any(self.variances <= 0):
            raise ValueError("all variances must be positive after flooring")

    @property
    def n_classes(self) -> int:
        return self.means.shape[0]

    @property
    def n_features(self) -> int:
        return self.means.shape[1]


def fit_naive_bayes(ds: Dataset) -> NaiveBayesModel:
    """Per-class feature Gaussians; variances floored relative to each
    feature's overall variance so no class-conditional density degenerates."""
    counts = ds.class_counts()
    if counts.min() < 1:
        missing = ds.class_names[int(np.argmin(counts))]
        raise ValueError(f"class {missing!r} has no samples")
    c, p = ds.n_classes, ds.n_features
    floor = 1e-9 * (ds.features.var(axis=0) + 1e-12)
    means = np.empty((c, p))
    variances = np.empty((c, p))
    for j in range(c):
        rows = ds.features[ds.labels == j]
        means[j] = rows.mean(axis=0)
        variances[j] = np.maximum(rows.var(axis=0), floor)
    return NaiveBayesModel(
        priors=counts / ds.n_samples, means=means, variances=variances, variance_floor=floor
    )


def nb_posterior(model: NaiveBayesModel, x) -> np.ndarray:
    """Normalized class posteriors, accumulated in log space for stability."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} feature values, got {x.size}")
    log_like = -0.5 * (
        np.log(2.0 * np.pi * model.variances) + (x - model.means) ** 2 / model.variances
    ).sum(axis=1)
    log_post = np.log(model.priors) + log_like
    log_post -= log_post.max()
    post = np.exp(log_post)
    return post / post.sum()


def predict_nb(model: NaiveBayesModel, x) -> int:
    """Highest posterior wins; ties go to the lowest class index."""
    return int(np.argmax(nb_posterior(model, x)))
