"""Full-batch Adam training on squared-error loss, with unscaled predictions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import Forecaster, build_model, mse_loss
from .scaling import ScalerPair, WindowedDataset


class TrainError(RuntimeError):
    pass


class Adam:
    def __init__(
        self,
        params: dict[str, np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, p in self.params.items():
            g = grads[name]
            self.m[name] = b1 * self.m[name] + (1 - b1) * g
            self.v[name] = b2 * self.v[name] + (1 - b2) * g * g
            mhat = self.m[name] / (1 - b1**self.t)
            vhat = self.v[name] / (1 - b2**self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


@dataclass
class TrainedForecaster:
    tag: str
    model: object  # Forecaster or GanModel
    scalers: ScalerPair
    loss_curve: list[float]
    predictions: dict[str, np.ndarray]  # unscaled train/test prices
    feature_names: tuple[str, ...]
    lookback: int
    seed: int
    diagnostics: dict[str, list[float]] = field(default_factory=dict)

    @property
    def params(self) -> dict[str, np.ndarray]:
        return self.model.params


def predict_unscaled(model, x: np.ndarray, scalers: ScalerPair) -> np.ndarray:
    """Forward pass followed by inverse target scaling."""
    return scalers.inverse_target(model.forward(x))


def train(
    tag: str,
    data: WindowedDataset,
    epochs: int = 200,
    seed: int = 0,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    **model_kwargs,
) -> TrainedForecaster:
    """Full-batch gradient descent on the mean squared error for ``epochs`` steps."""
    if data.X_train.shape[0] == 0:
        raise TrainError("empty training set")
    model = build_model(tag, data.n_features, data.lookback, seed, **model_kwargs)
    opt = Adam(model.params, lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    loss_curve: list[float] = []
    for epoch in range(epochs):
        yhat = model.forward(data.X_train)
        loss, dy = mse_loss(yhat, data.y_train)
        if not np.isfinite(loss):
            raise TrainError(f"non-finite loss at epoch {epoch}: {loss}")
        loss_curve.append(loss)
        model.zero_grads()
        model.backward(dy)
        opt.step(model.grads)
    predictions = {
        "train": predict_unscaled(model, data.X_train, data.scalers),
        "test": predict_unscaled(model, data.X_test, data.scalers),
    }
    return TrainedForecaster(
        tag=tag,
        model=model,
        scalers=data.scalers,
        loss_curve=loss_curve,
        predictions=predictions,
        feature_names=data.feature_names,
        lookback=data.lookback,
        seed=seed,
    )


def loss_curve_csv(curve: list[float], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,loss\n")
        for i, value in enumerate(curve):
            fh.write(f"{i},{value!r}\n")
