"""Versioned binary model checkpoints (magic TFC1).

Layout, little-endian throughout: magic | u32 version | tagged strings
and shapes for every parameter | raw f64 parameter data in table order |
scaler state | windowing metadata. Loading rebuilds the architecture and
bit-identical parameters.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .gan import Discriminator, GanModel, Generator
from .models import build_model
from .scaling import ScalerPair
from .training import TrainedForecaster

MAGIC = b"TFC1"
VERSION = 1


class CheckpointError(ValueError):
    pass


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.blob):
            raise CheckpointError("truncated checkpoint")
        out = struct.unpack_from(fmt, self.blob, self.pos)
        self.pos += size
        return out

    def take_str(self) -> str:
        (n,) = self.take("<H")
        raw = self.blob[self.pos : self.pos + n]
        if len(raw) != n:
            raise CheckpointError("truncated checkpoint string")
        self.pos += n
        return raw.decode("utf-8")

    def take_bytes(self, n: int) -> bytes:
        raw = self.blob[self.pos : self.pos + n]
        if len(raw) != n:
            raise CheckpointError("truncated checkpoint payload")
        self.pos += n
        return raw


def save_checkpoint(forecaster: TrainedForecaster, path: str | Path, extra: dict | None = None) -> None:
    params = forecaster.params
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", VERSION)
    out += _pack_str(forecaster.tag)
    out += struct.pack("<I", len(params))
    for name, arr in params.items():
        out += _pack_str(name)
        out += struct.pack("<B", arr.ndim)
        out += struct.pack(f"<{arr.ndim}I", *arr.shape)
    for arr in params.values():
        out += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    s = forecaster.scalers
    out += struct.pack("<dd", s.target_min, s.target_max)
    out += struct.pack("<I", len(s.feature_names))
    for i, name in enumerate(s.feature_names):
        out += _pack_str(name)
        out += struct.pack("<dd", float(s.feature_min[i]), float(s.feature_max[i]))
    out += struct.pack("<Iq", forecaster.lookback, forecaster.seed)
    extra = extra or {}
    out += struct.pack("<I", len(extra))
    for key, value in sorted(extra.items()):
        out += _pack_str(key)
        out += _pack_str(str(value))
    Path(path).write_bytes(bytes(out))


def load_checkpoint(path: str | Path) -> TrainedForecaster:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise CheckpointError(f"{path}: bad magic {blob[:4]!r}")
    r = _Reader(blob)
    r.pos = 4
    (version,) = r.take("<I")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    tag = r.take_str()
    (n_params,) = r.take("<I")
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for _ in range(n_params):
        name = r.take_str()
        (ndim,) = r.take("<B")
        shape = r.take(f"<{ndim}I") if ndim else ()
        shapes.append((name, tuple(shape)))
    values: dict[str, np.ndarray] = {}
    for name, shape in shapes:
        count = int(np.prod(shape)) if shape else 1
        raw = r.take_bytes(8 * count)
        values[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).astype(np.float64)

    target_min, target_max = r.take("<dd")
    (n_cols,) = r.take("<I")
    names, mins, maxs = [], [], []
    for _ in range(n_cols):
        names.append(r.take_str())
        lo, hi = r.take("<dd")
        mins.append(lo)
        maxs.append(hi)
    lookback, seed = r.take("<Iq")
    (n_extra,) = r.take("<I")
    extra = {}
    for _ in range(n_extra):
        key = r.take_str()
        extra[key] = r.take_str()

    scalers = ScalerPair(
        target_min=target_min,
        target_max=target_max,
        feature_names=tuple(names),
        feature_min=np.array(mins),
        feature_max=np.array(maxs),
    )
    n_features = len(names)

    # architecture dims come from the recorded shape table, not from defaults
    shape_of = dict(shapes)
    rng = np.random.default_rng(0)
    if tag == "gan":
        g_hidden = shape_of["G.lstm.b_f"][0]
        noise_dim = shape_of["G.lstm.W_fx"][0] - n_features
        d_hidden = shape_of["D.dense.W"][1]
        model = GanModel(
            Generator(rng, n_features, noise_dim, g_hidden),
            Discriminator(rng, n_features, lookback, d_hidden),
        )
    elif tag == "lstm":
        model = build_model(tag, n_features, lookback, seed=0, hidden=shape_of["lstm.b_f"][0])
    elif tag == "cnn":
        filters, kernel, _ = shape_of["conv.W"]
        model = build_model(
            tag, n_features, lookback, seed=0, filters=filters, kernel=kernel,
            dense_units=shape_of["dense.W"][1],
        )
    elif tag == "cnn_lstm":
        filters, kernel, _ = shape_of["conv.W"]
        model = build_model(
            tag, n_features, lookback, seed=0, hidden=shape_of["lstm.b_f"][0],
            filters=filters, kernel=kernel,
        )
    else:
        raise CheckpointError(f"{path}: unknown architecture tag {tag!r}")
    params = model.params
    if set(params) != set(values):
        raise CheckpointError(f"{path}: parameter table does not match architecture {tag!r}")
    for name, arr in params.items():
        if arr.shape != values[name].shape:
            raise CheckpointError(f"{path}: shape mismatch for {name}")
        arr[...] = values[name]

    return TrainedForecaster(
        tag=tag,
        model=model,
        scalers=scalers,
        loss_curve=[],
        predictions={},
        feature_names=tuple(names),
        lookback=lookback,
        seed=seed,
    )
