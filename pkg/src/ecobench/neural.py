"""Single-hidden-layer feed-forward classifier trained by backpropagation.

Hidden units apply the logistic sigmoid; outputs are linear, one per class,
fit to one-hot targets by full-batch gradient descent on squared error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset


@dataclass(frozen=True)
class MlpModel:
    input_to_hidden: np.ndarray
    hidden_bias: np.ndarray
    hidden_to_output: np.ndarray
    output_bias: np.ndarray

    def __post_init__(self):
        for name in ("input_to_hidden", "hidden_bias", "hidden_to_output", "output_bias"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            arr.flags.writeable = False
        p, q = self.input_to_hidden.shape
        c = self.output_bias.shape[0]
        if self.hidden_bias.shape != (q,) or self.hidden_to_output.shape != (q, c):
            raise ValueError("weight shapes are inconsistent")

    @property
    def n_inputs(self) -> int:
        return self.input_to_hidden.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.input_to_hidden.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.output_bias.shape[0]


@dataclass(frozen=True)
class TrainTrace:
    """Summed squared error after each weight update."""

    sse: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sse", tuple(float(v) for v in self.sse))

    @property
    def steps(self) -> int:
        return len(self.sse)

    @property
    def final_sse(self) -> float:
        return self.sse[-1] if self.sse else float("nan")


def sigmoid(x):
    """Logistic function 1/(1+e^-x), saturating without overflow."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def forward(model: MlpModel, x) -> np.ndarray:
    """Network outputs for one input: linear read-out of sigmoid hidden units."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.n_inputs:
        raise ValueError(f"expected {model.n_inputs} feature values, got {x.size}")
    hidden = sigmoid(model.hidden_bias + x @ model.input_to_hidden)
    return model.output_bias + hidden @ model.hidden_to_output


def mlp_loss(model: MlpModel, features, targets) -> float:
    """Half the summed squared output error over a batch."""
    x = np.asarray(features, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    hidden = sigmoid(x @ model.input_to_hidden + model.hidden_bias)
    outputs = hidden @ model.hidden_to_output + model.output_bias
    return float(0.5 * ((outputs - t) ** 2).sum())


def mlp_gradients(model: MlpModel, features, targets):
    """Backpropagated gradients of `mlp_loss` in the order
    (input_to_hidden, hidden_bias, hidden_to_output, output_bias)."""
    x = np.asarray(features, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    hidden = sigmoid(x @ model.input_to_hidden + model.hidden_bias)
    outputs = hidden @ model.hidden_to_output + model.output_bias
    d_out = outputs - t
    g_out_w = hidden.T @ d_out
    g_out_b = d_out.sum(axis=0)
    d_hidden = (d_out @ model.hidden_to_output.T) * hidden * (1.0 - hidden)
    g_in_w = x.T @ d_hidden
    g_in_b = d_hidden.sum(axis=0)
    return g_in_w, g_in_b, g_out_w, g_out_b


def fit_mlp(
    ds: Dataset,
    q: int = 5,
    epochs: int = 2000,
    learning_rate: float = 0.01,
    seed: int = 0,
    init_scale: float = 0.5,
) -> tuple[MlpModel, TrainTrace]:
    """Train on one-hot targets; weights start uniform in [-init_scale,
    +init_scale]. Stops at the epoch cap or once an epoch's nonnegative SSE
    improvement falls below 1e-10; worsening epochs keep training."""
    if ds.n_samples < 1:
        raise ValueError("cannot fit on an empty dataset")
    if q < 1 or epochs < 0 or learning_rate < 0 or init_scale < 0:
        raise ValueError("q must be >= 1; epochs, learning_rate, init_scale nonnegative")
    p, c, n = ds.n_features, ds.n_classes, ds.n_samples
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-init_scale, init_scale, size=(p, q))
    b1 = rng.uniform(-init_scale, init_scale, size=q)
    w2 = rng.uniform(-init_scale, init_scale, size=(q, c))
    b2 = rng.uniform(-init_scale, init_scale, size=c)

    x = ds.features
    targets = np.zeros((n, c))
    targets[np.arange(n), ds.labels] = 1.0

    def sse_of(w1_, b1_, w2_, b2_):
        hidden = sigmoid(x @ w1_ + b1_)
        return float((((hidden @ w2_ + b2_) - targets) ** 2).sum())

    prev = sse_of(w1, b1, w2, b2)
    if not np.isfinite(prev):
        raise ValueError("training loss became non-finite at epoch 0")
    trace = []
    for epoch in range(epochs):
        hidden = sigmoid(x @ w1 + b1)
        outputs = hidden @ w2 + b2
        d_out = outputs - targets
        d_hidden = (d_out @ w2.T) * hidden * (1.0 - hidden)
        w2 = w2 - learning_rate * (hidden.T @ d_out)
        b2 = b2 - learning_rate * d_out.sum(axis=0)
        w1 = w1 - learning_rate * (x.T @ d_hidden)
        b1 = b1 - learning_rate * d_hidden.sum(axis=0)
        sse = sse_of(w1, b1, w2, b2)
        if not np.isfinite(sse):
            raise ValueError(f"training loss became non-finite at epoch {epoch + 1}")
        trace.append(sse)
        if 0.0 <= prev - sse < 1e-10:
            break
        prev = sse
    model = MlpModel(
        input_to_hidden=w1, hidden_bias=b1, hidden_to_output=w2, output_bias=b2
    )
    return model, TrainTrace(sse=tuple(trace))


def predict_mlp(model: MlpModel, x) -> int:
    """Largest output wins; ties go to the lowest class index."""
    return int(np.argmax(forward(model, x)))


def trace_csv(trace: TrainTrace) -> str:
    """Two-column CSV of the training curve: epoch, sse."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["epoch", "sse"])
    for epoch, sse in enumerate(trace.sse, start=1):
        writer.writerow([epoch, f"{sse:.10g}"])
    return out.getvalue()
