"""Forecaster architectures wired from the layer primitives.

Tags:
  lstm      LSTM(50) -> ReLU on h_T -> Dense(1)
  cnn       Conv1D(64, k=2) -> ReLU -> MaxPool(2) -> Flatten -> Dense(50) -> ReLU -> Dense(1)
  cnn_lstm  Conv1D(64, k=2) -> ReLU -> LSTM(50) -> ReLU -> Dense(1)

The recurrence keeps its tanh cell/output nonlinearities; the quoted
"relu" activation is applied to the final hidden state ahead of the
output layer.
"""

from __future__ import annotations

import numpy as np

from .layers import Conv1D, Dense, Flatten, LSTM, MaxPool1D, ReLU

MODEL_TAGS = ("lstm", "cnn", "cnn_lstm", "gan")


class Forecaster:
    """A stack of layers mapping (N, lookback, features) to (N,) scaled targets."""

    def __init__(self, tag: str, layers: dict[str, object], order: list[tuple[str, str]]):
        self.tag = tag
        self._layers = layers
        self._order = order  # (layer name, "seq"/"vec") forward plan

    @property
    def params(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for name, layer in self._layers.items():
            for pname, arr in getattr(layer, "params", {}).items():
                out[f"{name}.{pname}"] = arr
        return out

    @property
    def grads(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for name, layer in self._layers.items():
            for pname, arr in getattr(layer, "grads", {}).items():
                out[f"{name}.{pname}"] = arr
        return out

    def zero_grads(self) -> None:
        for layer in self._layers.values():
            layer.zero_grads()

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = np.asarray(x, dtype=np.float64)
        for name, _kind in self._order:
            h = self._layers[name].forward(h)
        return h[:, 0]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        d = np.asarray(dy, dtype=np.float64)[:, None]
        for name, _kind in reversed(self._order):
            d = self._layers[name].backward(d)
        return d


def build_model(
    tag: str,
    n_features: int,
    lookback: int,
    seed: int,
    hidden: int = 50,
    filters: int = 64,
    kernel: int = 2,
    dense_units: int = 50,
) -> Forecaster:
    rng = np.random.default_rng(seed)
    if tag == "lstm":
        layers = {
            "lstm": LSTM(rng, n_features, hidden),
            "relu": ReLU(),
            "out": Dense(rng, hidden, 1),
        }
        order = [("lstm", "seq"), ("relu", "vec"), ("out", "vec")]
    elif tag == "cnn":
        conv_out = lookback - kernel + 1
        pooled = conv_out // 2
        if pooled < 1:
            raise ValueError(f"lookback {lookback} too short for conv kernel {kernel} + pooling")
        layers = {
            "conv": Conv1D(rng, n_features, filters, kernel),
            "relu1": ReLU(),
            "pool": MaxPool1D(2),
            "flatten": Flatten(),
            "dense": Dense(rng, pooled * filters, dense_units),
            "relu2": ReLU(),
            "out": Dense(rng, dense_units, 1),
        }
        order = [
            ("conv", "seq"),
            ("relu1", "seq"),
            ("pool", "seq"),
            ("flatten", "vec"),
            ("dense", "vec"),
            ("relu2", "vec"),
            ("out", "vec"),
        ]
    elif tag == "cnn_lstm":
        if lookback < kernel:
            raise ValueError(f"lookback {lookback} shorter than conv kernel {kernel}")
        layers = {
            "conv": Conv1D(rng, n_features, filters, kernel),
            "relu1": ReLU(),
            "lstm": LSTM(rng, filters, hidden),
            "relu2": ReLU(),
            "out": Dense(rng, hidden, 1),
        }
        order = [("conv", "seq"), ("relu1", "seq"), ("lstm", "seq"), ("relu2", "vec"), ("out", "vec")]
    else:
        raise ValueError(f"unknown model tag {tag!r} (GAN models are built in nn.gan)")
    return Forecaster(tag, layers, order)


def mse_loss(yhat: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error and its gradient w.r.t. yhat."""
    yhat = np.asarray(yhat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if yhat.shape != y.shape:
        raise ValueError(f"shape mismatch: {yhat.shape} vs {y.shape}")
    diff = yhat - y
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size
