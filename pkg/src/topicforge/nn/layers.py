"""Differentiable building blocks with explicit forward/backward passes.

Every layer keeps its forward cache on the instance and accumulates
parameter gradients into ``grads``; training loops call ``zero_grads``
between batches. All arithmetic is float64 so analytic gradients can be
checked against central finite differences at tight tolerances.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _uniform_init(rng: np.random.Generator, n_in: int, shape: tuple[int, ...]) -> np.ndarray:
    s = 1.0 / np.sqrt(n_in)
    return rng.uniform(-s, s, size=shape)


class Layer:
    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def zero_grads(self) -> None:
        for g in self.grads.values():
            g[...] = 0.0


class Dense(Layer):
    def __init__(self, rng: np.random.Generator, n_in: int, n_out: int):
        super().__init__()
        self.params = {"W": _uniform_init(rng, n_in, (n_in, n_out)), "b": np.zeros(n_out)}
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, d: np.ndarray) -> np.ndarray:
        self.grads["W"] += self._x.T @ d
        self.grads["b"] += d.sum(axis=0)
        return d @ self.params["W"].T


class ReLU(Layer):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.maximum(x, 0.0)  # np.maximum propagates NaN; np.where would hide it

    def backward(self, d: np.ndarray) -> np.ndarray:
        return d * self._mask


class Sigmoid(Layer):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self._out = sigmoid(x)
        return self._out

    def backward(self, d: np.ndarray) -> np.ndarray:
        return d * self._out * (1.0 - self._out)


class LSTM(Layer):
    """Gated recurrence: f/i/o gates via sigmoid, candidate via tanh,
    C_t = f*C_{t-1} + i*Chat_t, h_t = o * tanh(C_t). Zero initial state."""

    GATES = ("f", "i", "c", "o")

    def __init__(self, rng: np.random.Generator, n_in: int, hidden: int):
        super().__init__()
        self.n_in = n_in
        self.hidden = hidden
        for g in self.GATES:
            self.params[f"W_{g}x"] = _uniform_init(rng, n_in, (n_in, hidden))
            self.params[f"W_{g}h"] = _uniform_init(rng, hidden, (hidden, hidden))
            self.params[f"b_{g}"] = np.zeros(hidden)
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def forward(self, x: np.ndarray, keep_all: bool = False):
        """x: (N, T, n_in) -> h_T: (N, hidden). keep_all also returns (H, C) stacks."""
        n, t_steps, _ = x.shape
        p = self.params
        h = np.zeros((n, self.hidden))
        c = np.zeros((n, self.hidden))
        self._cache = []
        hs, cs = [], []
        for t in range(t_steps):
            xt = x[:, t, :]
            f = sigmoid(xt @ p["W_fx"] + h @ p["W_fh"] + p["b_f"])
            i = sigmoid(xt @ p["W_ix"] + h @ p["W_ih"] + p["b_i"])
            chat = np.tanh(xt @ p["W_cx"] + h @ p["W_ch"] + p["b_c"])
            o = sigmoid(xt @ p["W_ox"] + h @ p["W_oh"] + p["b_o"])
            c_new = f * c + i * chat
            tc = np.tanh(c_new)
            h_new = o * tc
            self._cache.append((xt, h, c, f, i, chat, o, tc))
            h, c = h_new, c_new
            if keep_all:
                hs.append(h)
                cs.append(c)
        if keep_all:
            return h, np.stack(hs, axis=1), np.stack(cs, axis=1)
        return h

    def backward(self, dh: np.ndarray) -> np.ndarray:
        """dh: gradient at h_T -> gradient w.r.t. the input sequence."""
        p, g = self.params, self.grads
        n = dh.shape[0]
        t_steps = len(self._cache)
        dx = np.zeros((n, t_steps, self.n_in))
        dc = np.zeros_like(dh)
        for t in range(t_steps - 1, -1, -1):
            xt, h_prev, c_prev, f, i, chat, o, tc = self._cache[t]
            do = dh * tc
            dao = do * o * (1.0 - o)
            dc_total = dc + dh * o * (1.0 - tc * tc)
            df = dc_total * c_prev
            daf = df * f * (1.0 - f)
            di = dc_total * chat
            dai = di * i * (1.0 - i)
            dchat = dc_total * i
            dac = dchat * (1.0 - chat * chat)
            for name, da in (("f", daf), ("i", dai), ("c", dac), ("o", dao)):
                g[f"W_{name}x"] += xt.T @ da
                g[f"W_{name}h"] += h_prev.T @ da
                g[f"b_{name}"] += da.sum(axis=0)
            dh = daf @ p["W_fh"].T + dai @ p["W_ih"].T + dac @ p["W_ch"].T + dao @ p["W_oh"].T
            dc = dc_total * f
            dx[:, t, :] = daf @ p["W_fx"].T + dai @ p["W_ix"].T + dac @ p["W_cx"].T + dao @ p["W_ox"].T
        return dx


class Conv1D(Layer):
    """Valid cross-correlation along time over the full feature depth."""

    def __init__(self, rng: np.random.Generator, n_in: int, filters: int, kernel: int):
        super().__init__()
        self.kernel = kernel
        self.params = {
            "W": _uniform_init(rng, n_in * kernel, (filters, kernel, n_in)),
            "b": np.zeros(filters),
        }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, t_steps, _ = x.shape
        if t_steps < self.kernel:
            raise ValueError(f"input length {t_steps} shorter than kernel {self.kernel}")
        self._x = x
        t_out = t_steps - self.kernel + 1
        w, b = self.params["W"], self.params["b"]
        z = np.tile(b, (n, t_out, 1))
        for dt in range(self.kernel):
            z += x[:, dt : dt + t_out, :] @ w[:, dt, :].T
        return z

    def backward(self, dz: np.ndarray) -> np.ndarray:
        x, w = self._x, self.params["W"]
        t_out = dz.shape[1]
        self.grads["b"] += dz.sum(axis=(0, 1))
        dx = np.zeros_like(x)
        for dt in range(self.kernel):
            self.grads["W"][:, dt, :] += np.einsum("ntk,ntf->kf", dz, x[:, dt : dt + t_out, :])
            dx[:, dt : dt + t_out, :] += dz @ w[:, dt, :]
        return dx


class MaxPool1D(Layer):
    """Non-overlapping max pooling along time; a trailing remainder is dropped."""

    def __init__(self, pool: int = 2):
        super().__init__()
        self.pool = pool

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, t_steps, k = x.shape
        t_out = t_steps // self.pool
        self._in_shape = x.shape
        blocks = x[:, : t_out * self.pool, :].reshape(n, t_out, self.pool, k)
        self._arg = blocks.argmax(axis=2)
        return blocks.max(axis=2)

    def backward(self, d: np.ndarray) -> np.ndarray:
        n, t_out, k = d.shape
        dx = np.zeros(self._in_shape)
        blocks = dx[:, : t_out * self.pool, :].reshape(n, t_out, self.pool, k)
        np.put_along_axis(blocks, self._arg[:, :, None, :], d[:, :, None, :], axis=2)
        dx[:, : t_out * self.pool, :] = blocks.reshape(n, t_out * self.pool, k)
        return dx


class Flatten(Layer):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, d: np.ndarray) -> np.ndarray:
        return d.reshape(self._shape)


def lstm_forward(cell: LSTM, x_sequence: np.ndarray):
    """Run one unbatched sequence (T, n_in); returns (h_T, all h_t, all C_t)."""
    x = np.asarray(x_sequence, dtype=np.float64)[None, :, :]
    h_last, hs, cs = cell.forward(x, keep_all=True)
    return h_last[0], hs[0], cs[0]


def conv1d_forward(stack: Conv1D, x_sequence: np.ndarray) -> np.ndarray:
    """Valid cross-correlation + ReLU on one unbatched sequence (T, n_in)."""
    x = np.asarray(x_sequence, dtype=np.float64)[None, :, :]
    z = stack.forward(x)
    return np.maximum(z[0], 0.0)


def maxpool(x: np.ndarray, pool_size: int = 2) -> np.ndarray:
    """Max over non-overlapping windows of a 1-D sequence, remainder dropped."""
    x = np.asarray(x, dtype=np.float64)
    t_out = x.shape[0] // pool_size
    if t_out == 0:
        return np.empty(0)
    return x[: t_out * pool_size].reshape(t_out, pool_size).max(axis=1)
