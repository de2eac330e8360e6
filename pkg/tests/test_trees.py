"""Impurity functions, single decision trees, and bagged forests."""

import numpy as np
import pytest

from ecobench import (
    Dataset,
    conditional_entropy,
    entropy,
    fit_decision_tree,
    fit_random_forest,
    forest_error_trace,
    forest_votes,
    gini_impurity,
    information_gain,
    predict_forest,
    predict_tree,
)


def _names(p):
    return tuple(f"f{j}" for j in range(p))


def _blob_dataset(seed, n_per=20, p=4, c=3, gap=6.0):
    rng = np.random.default_rng(seed)
    blocks = [rng.normal(gap * j, 1.0, size=(n_per, p)) for j in range(c)]
    labels = np.repeat(np.arange(c), n_per)
    return Dataset(np.vstack(blocks), labels, _names(p), tuple("XYZWV"[:c]))


def test_entropy_known_values():
    assert entropy([5, 5]) == 1.0
    assert entropy([7, 0]) == 0.0
    assert entropy([1, 1, 1, 1]) == 2.0
    assert entropy([2] * 8) == 3.0
    assert entropy([9, 5]) == pytest.approx(0.9402859586706311)


def test_entropy_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        entropy([3, -1])
    with pytest.raises(ValueError, match="all-zero"):
        entropy([0, 0])
    with pytest.raises(ValueError, match="nonempty"):
        entropy([])


def test_gini_known_values():
    assert gini_impurity([5, 5]) == 0.5
    assert gini_impurity([4, 0]) == 0.0
    assert gini_impurity([1, 1, 1, 1]) == 0.75
    with pytest.raises(ValueError, match="all-zero"):
        gini_impurity([0, 0])


def test_conditional_entropy_is_weighted_mean():
    parts = ([3, 0], [1, 2])
    expected = (3 / 6) * 0.0 + (3 / 6) * entropy([1, 2])
    assert conditional_entropy(parts) == pytest.approx(expected)
    with pytest.raises(ValueError, match="at least one part"):
        conditional_entropy([])


def test_information_gain_manual_case():
    parent = [4, 2]
    partition = ([3, 0], [1, 2])
    expected = entropy(parent) - conditional_entropy(partition)
    assert information_gain(parent, partition) == pytest.approx(expected)


def test_information_gain_requires_exact_partition():
    with pytest.raises(ValueError, match="sum exactly"):
        information_gain([4, 2], ([3, 0], [1, 1]))


def test_information_gain_nonnegative_over_random_partitions():
    rng = np.random.default_rng(31)
    for _ in range(300):
        c = int(rng.integers(2, 6))
        labels = rng.integers(0, c, size=int(rng.integers(2, 120)))
        mask = rng.random(labels.size) < rng.random()
        left = np.bincount(labels[mask], minlength=c)
        right = np.bincount(labels[~mask], minlength=c)
        parent = left + right
        if parent.sum() == 0:
            continue
        assert information_gain(parent, (left, right)) >= -1e-12


def test_tree_reproduces_consistent_data_exactly():
    ds = _blob_dataset(41, gap=1.0)
    model = fit_decision_tree(ds)
    predicted = [predict_tree(model, x) for x in ds.features]
    assert np.array_equal(predicted, ds.labels)


def test_tree_handles_zero_gain_root_split():
    # both features have zero gain at the root, yet the data is consistent
    features = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    labels = np.array([0, 1, 1, 0])
    ds = Dataset(features, labels, ("a", "b"), ("even", "odd"))
    model = fit_decision_tree(ds)
    assert [predict_tree(model, x) for x in features] == [0, 1, 1, 0]


def test_tree_leaf_majority_on_contradictory_rows():
    ds = Dataset([[1.0], [1.0], [1.0]], [1, 0, 1], ("a",), ("X", "Y"))
    model = fit_decision_tree(ds)
    assert model.root.is_leaf
    assert predict_tree(model, [1.0]) == 1
    tie = Dataset([[2.0], [2.0]], [1, 0], ("a",), ("X", "Y"))
    assert predict_tree(fit_decision_tree(tie), [2.0]) == 0


def test_tree_threshold_is_midpoint_and_ties_go_left():
    ds = Dataset([[1.0], [3.0]], [0, 1], ("a",), ("X", "Y"))
    model = fit_decision_tree(ds)
    assert model.root.threshold == 2.0
    assert predict_tree(model, [2.0]) == 0
    assert predict_tree(model, [2.0001]) == 1


def test_tree_split_tie_breaks_prefer_low_feature_then_low_threshold():
    ds = Dataset([[0.0, 0.0], [1.0, 1.0]], [0, 1], ("a", "b"), ("X", "Y"))
    assert fit_decision_tree(ds).root.feature_index == 0
    ds = Dataset([[0.0], [1.0], [2.0], [3.0]], [0, 1, 0, 1], ("a",), ("X", "Y"))
    # gains tie at thresholds 0.5 and 2.5; the lower one must win
    assert fit_decision_tree(ds).root.threshold == 0.5


def test_tree_depth_and_split_size_limits():
    ds = _blob_dataset(43)
    stump = fit_decision_tree(ds, max_depth=0)
    assert stump.root.is_leaf
    capped = fit_decision_tree(ds, max_depth=1)
    assert not capped.root.is_leaf
    assert capped.root.left.is_leaf and capped.root.right.is_leaf
    blocked = fit_decision_tree(ds, min_samples_split=ds.n_samples + 1)
    assert blocked.root.is_leaf


def test_tree_gini_criterion_also_fits_exactly():
    ds = _blob_dataset(47, gap=1.5)
    model = fit_decision_tree(ds, criterion="gini")
    assert all(predict_tree(model, x) == y for x, y in zip(ds.features, ds.labels))


def test_tree_fit_validation():
    ds = _blob_dataset(53)
    with pytest.raises(ValueError, match="criterion"):
        fit_decision_tree(ds, criterion="variance")
    with pytest.raises(ValueError, match="max_depth"):
        fit_decision_tree(ds, max_depth=-1)
    with pytest.raises(ValueError, match="min_samples_split"):
        fit_decision_tree(ds, min_samples_split=1)
    model = fit_decision_tree(ds)
    with pytest.raises(ValueError, match="expected 4 feature values"):
        predict_tree(model, [1.0, 2.0])


def test_forest_prediction_is_the_vote_mode():
    ds = _blob_dataset(59, gap=2.0)
    model = fit_random_forest(ds, n_trees=15, seed=3)
    rng = np.random.default_rng(61)
    for x in rng.normal(3.0, 4.0, size=(25, ds.n_features)):
        votes = forest_votes(model, x)
        assert votes.sum() == model.n_trees
        per_tree = [predict_tree(tree, x) for tree in model.trees]
        expected = np.argmax(np.bincount(per_tree, minlength=ds.n_classes))
        assert predict_forest(model, x) == expected


def test_forest_seed_determinism():
    ds = _blob_dataset(67, gap=1.0)
    a = fit_random_forest(ds, n_trees=20, seed=11)
    b = fit_random_forest(ds, n_trees=20, seed=11)
    c = fit_random_forest(ds, n_trees=20, seed=12)
    assert np.array_equal(a.importance, b.importance)
    grid = np.random.default_rng(71).normal(size=(30, ds.n_features))
    assert all(predict_forest(a, x) == predict_forest(b, x) for x in grid)
    assert not np.array_equal(a.importance, c.importance)


def test_forest_defaults_and_m_try():
    ds = _blob_dataset(73, n_per=5, p=9)
    model = fit_random_forest(ds, n_trees=3)
    assert model.n_trees == 3
    assert model.m_try == 3
    wide = fit_random_forest(ds, n_trees=2, m_try=9)
    assert wide.m_try == 9


def test_forest_importance_ignores_constant_feature():
    rng = np.random.default_rng(79)
    labels = np.repeat([0, 1], 20)
    informative = rng.normal(size=(40, 2)) + 4.0 * labels[:, None]
    features = np.column_stack([informative, np.full(40, 5.0)])
    ds = Dataset(features, labels, ("a", "b", "const"), ("X", "Y"))
    model = fit_random_forest(ds, n_trees=20, seed=1, m_try=2)
    assert np.all(model.importance >= 0.0)
    assert model.importance[2] == 0.0
    assert model.importance[:2].sum() > 0.0


def test_forest_without_bootstrap_fits_training_data():
    ds = _blob_dataset(83, gap=1.5)
    model = fit_random_forest(ds, n_trees=10, seed=5, bootstrap=False)
    assert all(predict_forest(model, x) == y for x, y in zip(ds.features, ds.labels))


def test_forest_error_trace_format():
    ds = _blob_dataset(89, n_per=8, gap=2.0)
    hold = _blob_dataset(97, n_per=4, gap=2.0)
    model = fit_random_forest(ds, n_trees=6, seed=2)
    text = forest_error_trace(model, ds, hold)
    lines = text.strip().splitlines()
    assert lines[0] == "n_trees,resubstitution_error,holdout_error"
    assert len(lines) == 7
    first = lines[1].split(",")
    assert first[0] == "1"
    for line in lines[1:]:
        _, resub, held = line.split(",")
        assert 0.0 <= float(resub) <= 1.0
        assert 0.0 <= float(held) <= 1.0
    resub_only = forest_error_trace(model, ds)
    assert resub_only.strip().splitlines()[0] == "n_trees,resubstitution_error"


def test_forest_validation():
    ds = _blob_dataset(101)
    with pytest.raises(ValueError, match="n_trees"):
        fit_random_forest(ds, n_trees=0)
    with pytest.raises(ValueError, match="m_try"):
        fit_random_forest(ds, n_trees=2, m_try=0)
    with pytest.raises(ValueError, match="m_try"):
        fit_random_forest(ds, n_trees=2, m_try=ds.n_features + 1)
