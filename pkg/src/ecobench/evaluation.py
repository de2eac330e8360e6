"""Benchmark harness: runs each classifier under resubstitution, holdout and
k-fold cross-validation, and assembles a comparison report.

Every (algorithm, process) cell is seeded from the master seed and the cell's
own identity, so removing one cell never changes another's numbers, while the
split or fold plan for one process is shared by all algorithms.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, k_fold, standardize, train_test_split
from .linear_prob import (
    fit_lda,
    fit_logistic,
    fit_naive_bayes,
    predict_lda,
    predict_logistic,
    predict_nb,
)
from .margin_instance import (
    KernelSpec,
    default_gamma,
    fit_knn,
    fit_svm_multiclass,
    knn_predict,
    predict_svm,
)
from .metrics import BinaryAggregates, MeasureSet, confusion_matrix, macro_aggregate, measures
from .neural import fit_mlp, predict_mlp
from .trees import fit_decision_tree, fit_random_forest, predict_forest, predict_tree

ALGORITHM_ORDER = ("DT", "RF", "ANN", "SVM", "LDA", "KNN", "LR", "NB")
PROCESS_ORDER = ("I", "II", "III")


@dataclass(frozen=True)
class ProcessKind:
    """One evaluation protocol: I resubstitution, II holdout, III k-fold CV."""

    name: str
    train_fraction: float = 0.75
    folds: int = 3

    def __post_init__(self):
        if self.name not in PROCESS_ORDER:
            raise ValueError(f"process must be one of {PROCESS_ORDER}, got {self.name!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.folds < 2:
            raise ValueError(f"folds must be at least 2, got {self.folds}")


PROCESS_RESUBSTITUTION = ProcessKind("I")
PROCESS_HOLDOUT = ProcessKind("II")
PROCESS_CV = ProcessKind("III")


def parse_processes(text: str, train_fraction: float = 0.75, folds: int = 3):
    """Comma list like 'I,III' to ProcessKind tuple, keeping table order."""
    wanted = {part.strip().upper() for part in text.split(",") if part.strip()}
    unknown = wanted - set(PROCESS_ORDER)
    if unknown or not wanted:
        raise ValueError(f"processes must be drawn from {','.join(PROCESS_ORDER)}, got {text!r}")
    return tuple(
        ProcessKind(name, train_fraction=train_fraction, folds=folds)
        for name in PROCESS_ORDER
        if name in wanted
    )


@dataclass(frozen=True)
class AlgorithmSpec:
    """Canonical algorithm id plus hyperparameter overrides."""

    name: str
    params: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ValueError(
                f"unknown algorithm {self.name!r}; choose from {', '.join(ALGORITHM_ORDER)}"
            )
        object.__setattr__(self, "params", tuple((str(k), v) for k, v in self.params))
        allowed = _REGISTRY[self.name].param_names
        for key, _ in self.params:
            if key not in allowed:
                raise ValueError(
                    f"{self.name} does not take parameter {key!r}; allowed: {allowed or '(none)'}"
                )

    def param_dict(self) -> dict:
        return dict(self.params)


def make_algorithm(name: str, **params) -> AlgorithmSpec:
    return AlgorithmSpec(name=name.strip().upper(), params=tuple(sorted(params.items())))


def parse_algorithms(text: str):
    """Comma list like 'lda,nb' to AlgorithmSpec tuple in canonical order."""
    wanted = {part.strip().upper() for part in text.split(",") if part.strip()}
    unknown = wanted - set(ALGORITHM_ORDER)
    if unknown or not wanted:
        raise ValueError(
            f"algorithms must be drawn from {','.join(ALGORITHM_ORDER)}, got {text!r}"
        )
    return tuple(AlgorithmSpec(name) for name in ALGORITHM_ORDER if name in wanted)


def _fit_svm(train: Dataset, seed: int, params: dict):
    params = dict(params)
    kind = params.pop("kernel", None)
    gamma = params.pop("gamma", None)
    if kind is not None or gamma is not None:
        kind = kind or "rbf"
        if kind == "rbf" and gamma is None:
            gamma = default_gamma(train.n_features)
        params["kernel"] = KernelSpec(kind, gamma if kind == "rbf" else None)
    return fit_svm_multiclass(train, **params)


@dataclass(frozen=True)
class AlgorithmAdapter:
    name: str
    fit: object
    predict_one: object
    param_names: tuple[str, ...]

    def predict(self, model, features: np.ndarray) -> np.ndarray:
        return np.array([self.predict_one(model, x) for x in np.atleast_2d(features)],
                        dtype=np.int64)


_REGISTRY = {
    "DT": AlgorithmAdapter(
        "DT",
        lambda train, seed, p: fit_decision_tree(train, **p),
        predict_tree,
        ("max_depth", "min_samples_split", "criterion"),
    ),
    "RF": AlgorithmAdapter(
        "RF",
        lambda train, seed, p: fit_random_forest(train, seed=seed, **p),
        predict_forest,
        ("n_trees", "m_try", "max_depth", "min_samples_split"),
    ),
    "ANN": AlgorithmAdapter(
        "ANN",
        lambda train, seed, p: fit_mlp(train, seed=seed, **p)[0],
        predict_mlp,
        ("q", "epochs", "learning_rate", "init_scale"),
    ),
    "SVM": AlgorithmAdapter(
        "SVM",
        _fit_svm,
        predict_svm,
        ("cost", "tol", "kernel", "gamma"),
    ),
    "LDA": AlgorithmAdapter(
        "LDA",
        lambda train, seed, p: fit_lda(train),
        predict_lda,
        (),
    ),
    "KNN": AlgorithmAdapter(
        "KNN",
        lambda train, seed, p: fit_knn(train, **p),
        knn_predict,
        ("k",),
    ),
    "LR": AlgorithmAdapter(
        "LR",
        lambda train, seed, p: fit_logistic(train, **p),
        predict_logistic,
        ("learning_rate", "max_iter", "tolerance"),
    ),
    "NB": AlgorithmAdapter(
        "NB",
        lambda train, seed, p: fit_naive_bayes(train),
        predict_nb,
        (),
    ),
}


def algorithm_adapter(name: str) -> AlgorithmAdapter:
    if name not in _REGISTRY:
        raise ValueError(f"unknown algorithm {name!r}")
    return _REGISTRY[name]


def derive_seed(master_seed: int, *parts: str) -> int:
    """Stable 64-bit seed from the master seed and identity strings."""
    text = "|".join([str(int(master_seed)), *parts])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


@dataclass(frozen=True)
class ReportRow:
    algorithm: str
    process: str
    aggregates: BinaryAggregates | None
    measures: MeasureSet | None
    wall_ms: float
    seed: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class BenchmarkReport:
    master_seed: int
    dataset_summary: dict
    rows: tuple[ReportRow, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def get(self, algorithm: str, process: str) -> ReportRow:
        for row in self.rows:
            if row.algorithm == algorithm and row.process == process:
                return row
        raise KeyError(f"no row for ({algorithm}, {process})")


def _cell_predictions(ds: Dataset, adapter: AlgorithmAdapter, params: dict,
                      kind: ProcessKind, seed: int, split_seed: int):
    """Actual and predicted labels for one cell, scaling fit on train rows only."""
    if kind.name == "I":
        train, scaling = standardize(ds)
        model = adapter.fit(train, seed, params)
        return ds.labels, adapter.predict(model, train.features)
    if kind.name == "II":
        train_raw, test_raw = train_test_split(ds, kind.train_fraction, split_seed)
        train, scaling = standardize(train_raw)
        model = adapter.fit(train, seed, params)
        return test_raw.labels, adapter.predict(model, scaling.apply(test_raw.features))
    plan = k_fold(ds, kind.folds, split_seed)
    actual_parts, predicted_parts = [], []
    for i, fold in enumerate(plan.folds):
        train, scaling = standardize(ds.subset(plan.train_indices(i)))
        model = adapter.fit(train, seed, params)
        actual_parts.append(ds.labels[fold])
        predicted_parts.append(adapter.predict(model, scaling.apply(ds.features[fold])))
    return np.concatenate(actual_parts), np.concatenate(predicted_parts)


def run_process(
    ds: Dataset,
    algorithm: AlgorithmSpec,
    kind: ProcessKind,
    seed: int,
    split_seed: int | None = None,
) -> ReportRow:
    """Evaluate one algorithm under one process; failures come back as an
    error row rather than an exception so a sweep can continue."""
    adapter = algorithm_adapter(algorithm.name)
    split_seed = seed if split_seed is None else split_seed
    start = time.perf_counter()
    try:
        actual, predicted = _cell_predictions(
            ds, adapter, algorithm.param_dict(), kind, seed, split_seed
        )
        cm = confusion_matrix(actual, predicted, ds.n_classes)
        agg = macro_aggregate(cm)
        found = measures(agg)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        wall_ms = (time.perf_counter() - start) * 1000.0
        return ReportRow(algorithm.name, kind.name, None, None, wall_ms, seed, error=str(exc))
    wall_ms = (time.perf_counter() - start) * 1000.0
    return ReportRow(algorithm.name, kind.name, agg, found, wall_ms, seed)


def run_benchmark(
    ds: Dataset,
    algorithms=None,
    processes=None,
    master_seed: int = 42,
    source: str = "memory",
) -> BenchmarkReport:
    """All (algorithm, process) cells, process-major, independently seeded."""
    if algorithms is None:
        algorithms = tuple(AlgorithmSpec(name) for name in ALGORITHM_ORDER)
    if processes is None:
        processes = (PROCESS_RESUBSTITUTION, PROCESS_HOLDOUT, PROCESS_CV)
    algorithms = tuple(algorithms)
    processes = tuple(processes)
    if not algorithms or not processes:
        raise ValueError("need at least one algorithm and one process")
    rows = []
    for kind in processes:
        split_seed = derive_seed(master_seed, "split", kind.name)
        for algorithm in algorithms:
            rows.append(
                run_process(
                    ds,
                    algorithm,
                    kind,
                    seed=derive_seed(master_seed, algorithm.name, kind.name),
                    split_seed=split_seed,
                )
            )
    counts = ds.class_counts()
    summary = {
        "source": source,
        "n_samples": ds.n_samples,
        "n_features": ds.n_features,
        "n_classes": ds.n_classes,
        "class_counts": {name: int(counts[i]) for i, name in enumerate(ds.class_names)},
    }
    return BenchmarkReport(master_seed=master_seed, dataset_summary=summary, rows=tuple(rows))


def rank_algorithms(report: BenchmarkReport, process: str) -> list[str]:
    """Algorithm names by descending accuracy; ties by F-score, then name."""
    rows = [r for r in report.rows if r.process == process]
    if not rows:
        raise ValueError(f"report has no rows for process {process!r}")
    scored = [r for r in rows if r.ok]
    scored.sort(key=lambda r: (-r.measures.accuracy, -r.measures.f_score, r.algorithm))
    return [r.algorithm for r in scored]
