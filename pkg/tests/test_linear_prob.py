"""Discriminant analysis, softmax regression, and Gaussian naive Bayes."""

import numpy as np
import pytest

from ecobench import (
    Dataset,
    LdaModel,
    LogisticModel,
    discriminant_table,
    fisher_score,
    fit_lda,
    fit_logistic,
    fit_naive_bayes,
    lda_score,
    logistic_loss_and_gradient,
    mahalanobis_sq,
    nb_posterior,
    predict_lda,
    predict_logistic,
    predict_logistic_proba,
    predict_nb,
    standardize,
)
from ecobench.linear_prob import LDA_REGULARIZATION_EPSILON


def _names(p):
    return tuple(f"f{j}" for j in range(p))


def _blob_dataset(seed, n_per=20, p=4, c=3, gap=6.0):
    rng = np.random.default_rng(seed)
    blocks = [rng.normal(gap * j, 1.0, size=(n_per, p)) for j in range(c)]
    labels = np.repeat(np.arange(c), n_per)
    return Dataset(np.vstack(blocks), labels, _names(p), tuple("XYZWV"[:c]))


# ---------------------------------------------------------------- LDA


def test_lda_separated_classes_resubstitution():
    ds = _blob_dataset(1)
    model = fit_lda(ds)
    predicted = [predict_lda(model, x) for x in ds.features]
    assert np.array_equal(predicted, ds.labels)


def test_lda_means_priors_and_pooled_covariance():
    ds = _blob_dataset(2, n_per=15)
    model = fit_lda(ds)
    for j in range(3):
        rows = ds.features[ds.labels == j]
        assert np.allclose(model.class_means[j], rows.mean(axis=0))
    assert np.allclose(model.priors, [1 / 3, 1 / 3, 1 / 3])

    pooled = np.zeros((4, 4))
    for j in range(3):
        rows = ds.features[ds.labels == j]
        centered = rows - rows.mean(axis=0)
        pooled += centered.T @ centered
    pooled /= ds.n_samples
    ridge = LDA_REGULARIZATION_EPSILON * np.trace(pooled) / 4
    assert np.allclose(model.pooled_covariance, pooled + ridge * np.eye(4), atol=1e-12)


def test_lda_axes_count_and_normalization():
    ds = _blob_dataset(3, p=6)
    model = fit_lda(ds)
    assert model.discriminant_axes.shape == (2, 6)
    for axis in model.discriminant_axes:
        assert axis @ model.pooled_covariance @ axis == pytest.approx(1.0, abs=1e-9)


def test_fisher_score_is_maximized_by_first_axis():
    ds = _blob_dataset(4, p=5)
    model = fit_lda(ds)
    best = fisher_score(model, model.discriminant_axes[0])
    rng = np.random.default_rng(5)
    for _ in range(200):
        direction = rng.normal(size=5)
        direction /= np.linalg.norm(direction)
        assert fisher_score(model, direction) <= best * (1 + 1e-9) + 1e-12


def test_lda_score_scale_invariant_and_symmetric():
    ds = _blob_dataset(6)
    model = fit_lda(ds)
    direction = np.arange(1.0, 5.0)
    assert lda_score(model, direction, 0, 1) == pytest.approx(
        lda_score(model, 3.7 * direction, 0, 1)
    )
    assert lda_score(model, direction, 0, 1) == pytest.approx(
        lda_score(model, direction, 1, 0)
    )


def test_mahalanobis_known_values():
    model = LdaModel(
        class_means=np.array([[0.0, 0.0], [3.0, 4.0]]),
        pooled_covariance=np.eye(2),
        priors=np.array([0.5, 0.5]),
        discriminant_axes=np.array([[1.0, 0.0]]),
        regularization_epsilon=0.0,
    )
    assert mahalanobis_sq(model, 0, 0) == 0.0
    assert mahalanobis_sq(model, 0, 1) == pytest.approx(25.0, abs=1e-12)
    assert mahalanobis_sq(model, 1, 0) == pytest.approx(25.0, abs=1e-12)


def test_mahalanobis_affine_invariance():
    ds = _blob_dataset(7, gap=3.0)
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    transform = q @ np.diag(rng.uniform(0.5, 2.0, size=4))
    shifted = Dataset(
        ds.features @ transform.T + rng.normal(size=4),
        ds.labels,
        ds.feature_names,
        ds.class_names,
    )
    original = fit_lda(ds)
    mapped = fit_lda(shifted)
    for i in range(3):
        for j in range(3):
            assert abs(
                mahalanobis_sq(original, i, j) - mahalanobis_sq(mapped, i, j)
            ) < 1e-6


def test_predict_lda_picks_nearest_mean_under_equal_priors():
    ds = _blob_dataset(9, gap=4.0)
    model = fit_lda(ds)
    inv = np.linalg.inv(model.pooled_covariance)
    rng = np.random.default_rng(10)
    for x in rng.normal(4.0, 5.0, size=(40, 4)):
        distances = [
            (x - mean) @ inv @ (x - mean) for mean in model.class_means
        ]
        assert predict_lda(model, x) == int(np.argmin(distances))


def test_discriminant_table_lists_axis_coefficients():
    ds = _blob_dataset(11)
    model = fit_lda(ds)
    lines = discriminant_table(model, ds.feature_names).strip().splitlines()
    assert lines[0] == "feature,LD1,LD2"
    assert len(lines) == 1 + ds.n_features
    name, ld1, ld2 = lines[1].split(",")
    assert name == "f0"
    assert float(ld1) == pytest.approx(model.discriminant_axes[0, 0], rel=1e-9)
    assert float(ld2) == pytest.approx(model.discriminant_axes[1, 0], rel=1e-9)


def test_fit_lda_validation():
    tiny = Dataset(np.eye(3), [0, 1, 2], _names(3), ("X", "Y", "Z"))
    with pytest.raises(ValueError, match="more samples than classes"):
        fit_lda(tiny)
    lone = Dataset(
        np.arange(10.0).reshape(5, 2), [0, 0, 1, 1, 2], ("a", "b"), ("X", "Y", "Z")
    )
    with pytest.raises(ValueError, match="at least 2 samples"):
        fit_lda(lone)
    flat = Dataset(np.ones((6, 2)), [0, 0, 0, 1, 1, 1], ("a", "b"), ("X", "Y"))
    with pytest.raises(ValueError, match="constant"):
        fit_lda(flat)


# ---------------------------------------------------------------- logistic


def test_logistic_loss_at_zero_weights_is_log_c():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(15, 3))
    y = rng.integers(0, 4, size=15)
    loss, grad = logistic_loss_and_gradient(np.zeros((4, 4)), x, y)
    assert loss == pytest.approx(np.log(4.0))
    assert np.all(grad[-1] == 0.0)


def test_logistic_gradient_matches_finite_differences():
    rng = np.random.default_rng(13)
    x = rng.normal(size=(12, 3))
    y = rng.integers(0, 3, size=12)
    w = rng.normal(scale=0.5, size=(3, 4))
    w[-1] = 0.0
    _, grad = logistic_loss_and_gradient(w, x, y)
    step = 1e-6
    for row in range(2):
        for col in range(4):
            bumped = w.copy()
            bumped[row, col] += step
            up, _ = logistic_loss_and_gradient(bumped, x, y)
            bumped[row, col] -= 2 * step
            down, _ = logistic_loss_and_gradient(bumped, x, y)
            numeric = (up - down) / (2 * step)
            assert grad[row, col] == pytest.approx(numeric, abs=1e-7)


def test_fit_logistic_learns_separated_blobs():
    ds, _ = standardize(_blob_dataset(14, gap=3.0))
    model = fit_logistic(ds, learning_rate=0.5, max_iter=2000)
    predicted = [predict_logistic(model, x) for x in ds.features]
    assert np.array_equal(predicted, ds.labels)
    assert model.loss_history[-1] <= model.loss_history[0]
    assert model.final_loss < np.log(3.0)


def test_fit_logistic_stops_when_loss_settles():
    ds, _ = standardize(_blob_dataset(15, n_per=10, gap=4.0))
    model = fit_logistic(ds, learning_rate=0.2, max_iter=50000, tolerance=1e-6)
    assert model.iterations < 50000
    assert len(model.loss_history) == model.iterations + 1


def test_predict_logistic_proba_sums_to_one():
    ds = _blob_dataset(16)
    model = fit_logistic(ds, max_iter=200)
    rng = np.random.default_rng(17)
    for x in rng.normal(size=(30, 4)):
        probs = predict_logistic_proba(model, x)
        assert probs.shape == (3,)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(probs >= 0)


def test_logistic_model_requires_pinned_last_row():
    with pytest.raises(ValueError, match="pinned"):
        LogisticModel(
            weights=np.ones((2, 3)), iterations=1, final_loss=0.5, loss_history=()
        )


def test_fit_logistic_validation():
    ds = _blob_dataset(18)
    with pytest.raises(ValueError, match="learning_rate"):
        fit_logistic(ds, learning_rate=0.0)
    tiny = Dataset([[0.0], [1.0]], [0, 1], ("a",), ("X", "Y", "Z"))
    with pytest.raises(ValueError, match="as many samples as classes"):
        fit_logistic(tiny)


# ---------------------------------------------------------------- naive Bayes


def test_nb_fit_matches_per_class_moments():
    ds = _blob_dataset(19, n_per=12)
    model = fit_naive_bayes(ds)
    for j in range(3):
        rows = ds.features[ds.labels == j]
        assert np.allclose(model.means[j], rows.mean(axis=0))
        assert np.allclose(model.variances[j], rows.var(axis=0))
    assert np.allclose(model.priors, [1 / 3, 1 / 3, 1 / 3])


def test_nb_posterior_matches_direct_product():
    ds = _blob_dataset(20, gap=2.0)
    model = fit_naive_bayes(ds)
    rng = np.random.default_rng(21)
    for x in rng.normal(2.0, 3.0, size=(60, 4)):
        direct = model.priors * np.prod(
            np.exp(-0.5 * (x - model.means) ** 2 / model.variances)
            / np.sqrt(2 * np.pi * model.variances),
            axis=1,
        )
        direct /= direct.sum()
        assert np.allclose(nb_posterior(model, x), direct, atol=1e-12)


def test_nb_posterior_sums_to_one_and_predicts_argmax():
    ds = _blob_dataset(22)
    model = fit_naive_bayes(ds)
    rng = np.random.default_rng(23)
    for x in rng.normal(size=(25, 4)):
        post = nb_posterior(model, x)
        assert post.sum() == pytest.approx(1.0, abs=1e-12)
        assert predict_nb(model, x) == int(np.argmax(post))


def test_nb_recovers_separated_blobs():
    ds = _blob_dataset(24)
    model = fit_naive_bayes(ds)
    predicted = [predict_nb(model, x) for x in ds.features]
    assert np.array_equal(predicted, ds.labels)


def test_nb_variance_floor_handles_constant_feature():
    features = np.column_stack(
        [np.full(12, 3.0), np.random.default_rng(25).normal(size=12)]
    )
    ds = Dataset(features, np.repeat([0, 1], 6), ("const", "noise"), ("X", "Y"))
    model = fit_naive_bayes(ds)
    assert np.all(model.variances > 0)
    post = nb_posterior(model, [3.0, 0.2])
    assert np.all(np.isfinite(post))


def test_nb_requires_every_class_present():
    ds = Dataset(np.eye(4), [0, 0, 1, 1], _names(4), ("X", "Y", "Z"))
    with pytest.raises(ValueError, match="no samples"):
        fit_naive_bayes(ds)
