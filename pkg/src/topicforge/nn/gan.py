"""Adversarial forecaster: generator vs discriminator over (window, next value).

The generator reads the feature window with a noise vector appended to
every timestep and emits the scaled next value; the discriminator scores
(flattened window, value) pairs as real/generated. Training alternates
one full-batch ascent step on the discriminator objective

    E[log D(w, real)] + E[log(1 - D(w, G(w, z)))]

with one descent step for the generator on E[log(1 - D(w, G(w, z)))]
(or ascent on E[log D] with ``non_saturating``). Point forecasts use z = 0.
"""

from __future__ import annotations

import warnings

import numpy as np

from .layers import Dense, LSTM, ReLU, Sigmoid
from .models import Forecaster
from .training import Adam, TrainedForecaster, TrainError
from .scaling import WindowedDataset

D_EPS = 1e-7  # probability clamp keeping both log terms finite


class Generator:
    def __init__(self, rng: np.random.Generator, n_features: int, noise_dim: int, hidden: int = 32):
        self.noise_dim = noise_dim
        self.lstm = LSTM(rng, n_features + noise_dim, hidden)
        self.out = Dense(rng, hidden, 1)
        self._layers = {"lstm": self.lstm, "out": self.out}

    @property
    def params(self):
        return {f"{n}.{p}": a for n, layer in self._layers.items() for p, a in layer.params.items()}

    @property
    def grads(self):
        return {f"{n}.{p}": a for n, layer in self._layers.items() for p, a in layer.grads.items()}

    def zero_grads(self):
        for layer in self._layers.values():
            layer.zero_grads()

    def _with_noise(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        tiled = np.repeat(z[:, None, :], x.shape[1], axis=1)
        return np.concatenate([x, tiled], axis=2)

    def forward(self, x: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
        if z is None:
            z = np.zeros((x.shape[0], self.noise_dim))
        h = self.lstm.forward(self._with_noise(x, z))
        return self.out.forward(h)[:, 0]

    def backward(self, dv: np.ndarray) -> None:
        dh = self.out.backward(dv[:, None])
        self.lstm.backward(dh)


class Discriminator:
    def __init__(self, rng: np.random.Generator, n_features: int, lookback: int, hidden: int = 32):
        n_in = lookback * n_features + 1
        self.dense = Dense(rng, n_in, hidden)
        self.relu = ReLU()
        self.out = Dense(rng, hidden, 1)
        self.sig = Sigmoid()
        self._layers = {"dense": self.dense, "out": self.out}

    @property
    def params(self):
        return {f"{n}.{p}": a for n, layer in self._layers.items() for p, a in layer.params.items()}

    @property
    def grads(self):
        return {f"{n}.{p}": a for n, layer in self._layers.items() for p, a in layer.grads.items()}

    def zero_grads(self):
        for layer in self._layers.values():
            layer.zero_grads()

    def forward(self, x: np.ndarray, value: np.ndarray) -> np.ndarray:
        flat = np.concatenate([x.reshape(x.shape[0], -1), value[:, None]], axis=1)
        h = self.sig.forward(self.out.forward(self.relu.forward(self.dense.forward(flat))))
        return h[:, 0]

    def backward(self, dp: np.ndarray) -> np.ndarray:
        """Returns the gradient w.r.t. the value input (last flat column)."""
        d = self.sig.backward(dp[:, None])
        d = self.dense.backward(self.relu.backward(self.out.backward(d)))
        return d[:, -1]


class GanModel:
    """Bundles G and D; ``forward`` is the deterministic z = 0 forecast."""

    def __init__(self, generator: Generator, discriminator: Discriminator):
        self.G = generator
        self.D = discriminator

    @property
    def params(self):
        out = {f"G.{k}": v for k, v in self.G.params.items()}
        out.update({f"D.{k}": v for k, v in self.D.params.items()})
        return out

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.G.forward(x, None)


def _clamped(p: np.ndarray) -> np.ndarray:
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        warnings.warn("discriminator output saturated to exactly 0/1; clamping")
    return np.clip(p, D_EPS, 1.0 - D_EPS)


def gan_value(d_real: np.ndarray, d_fake: np.ndarray) -> float:
    """Minimax objective E[log D(real)] + E[log(1 - D(fake))], clamp applied."""
    return float(np.mean(np.log(_clamped(d_real))) + np.mean(np.log1p(-_clamped(d_fake))))


def d_loss_and_grad(p: np.ndarray, real_mask: np.ndarray) -> tuple[float, np.ndarray]:
    """Discriminator NLL over a mixed batch and gradient w.r.t. its outputs."""
    pc = _clamped(p)
    n_real = int(real_mask.sum())
    n_fake = p.size - n_real
    loss = -(np.log(pc[real_mask]).sum() / n_real + np.log1p(-pc[~real_mask]).sum() / n_fake)
    grad = np.where(real_mask, -1.0 / (pc * n_real), 1.0 / ((1.0 - pc) * n_fake))
    grad[(p <= 0.0) | (p >= 1.0)] = 0.0
    return float(loss), grad


def g_loss_and_grad(p: np.ndarray, non_saturating: bool) -> tuple[float, np.ndarray]:
    """Generator objective on D's fake outputs and gradient w.r.t. them."""
    pc = _clamped(p)
    if non_saturating:
        loss = -float(np.mean(np.log(pc)))
        grad = -1.0 / (pc * p.size)
    else:
        loss = float(np.mean(np.log1p(-pc)))
        grad = -1.0 / ((1.0 - pc) * p.size)
    grad = grad.copy()
    grad[(p <= 0.0) | (p >= 1.0)] = 0.0
    return loss, grad


def gan_train(
    data: WindowedDataset,
    epochs: int = 200,
    seed: int = 0,
    noise_dim: int = 4,
    hidden: int = 32,
    lr: float = 1e-3,
    non_saturating: bool = False,
) -> TrainedForecaster:
    """Alternating full-batch D/G steps; the value curve is recorded per epoch."""
    if data.X_train.shape[0] == 0:
        raise TrainError("empty training set")
    if noise_dim < 1:
        raise TrainError(f"noise_dim must be >= 1, got {noise_dim}")
    rng = np.random.default_rng(seed)
    x, y = data.X_train, data.y_train
    n = x.shape[0]
    gen = Generator(rng, data.n_features, noise_dim, hidden)
    dis = Discriminator(rng, data.n_features, data.lookback, hidden)
    opt_g = Adam(gen.params, lr=lr)
    opt_d = Adam(dis.params, lr=lr)

    value_curve: list[float] = []
    accuracy_curve: list[float] = []
    x2 = np.concatenate([x, x], axis=0)
    real_mask = np.zeros(2 * n, dtype=bool)
    real_mask[:n] = True

    for epoch in range(epochs):
        # discriminator ascent (descend its NLL)
        z = rng.normal(size=(n, noise_dim))
        fake = gen.forward(x, z)
        values = np.concatenate([y, fake])
        p = dis.forward(x2, values)
        d_loss, dp = d_loss_and_grad(p, real_mask)
        if not np.isfinite(d_loss):
            raise TrainError(f"non-finite discriminator loss at epoch {epoch}")
        dis.zero_grads()
        dis.backward(dp)
        opt_d.step(dis.grads)

        # diagnostics at the current equilibrium: after D's update, before G moves
        p_real_eval = dis.forward(x, y)
        p_fake_eval = dis.forward(x, gen.forward(x, z))
        value_curve.append(gan_value(p_real_eval, p_fake_eval))
        accuracy_curve.append(
            float((np.sum(p_real_eval > 0.5) + np.sum(p_fake_eval <= 0.5)) / (2 * n))
        )

        # generator step through a frozen discriminator
        z = rng.normal(size=(n, noise_dim))
        fake = gen.forward(x, z)
        p_fake = dis.forward(x, fake)
        g_loss, dp_fake = g_loss_and_grad(p_fake, non_saturating)
        if not np.isfinite(g_loss):
            raise TrainError(f"non-finite generator loss at epoch {epoch}")
        dis.zero_grads()
        dvalue = dis.backward(dp_fake)
        gen.zero_grads()
        gen.backward(dvalue)
        opt_g.step(gen.grads)
        dis.zero_grads()

    model = GanModel(gen, dis)
    predictions = {
        "train": data.scalers.inverse_target(model.forward(data.X_train)),
        "test": data.scalers.inverse_target(model.forward(data.X_test)),
    }
    return TrainedForecaster(
        tag="gan",
        model=model,
        scalers=data.scalers,
        loss_curve=value_curve,
        predictions=predictions,
        feature_names=data.feature_names,
        lookback=data.lookback,
        seed=seed,
        diagnostics={"d_accuracy": accuracy_curve},
    )
