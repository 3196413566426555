"""Dual min-max scaling and sliding-window dataset construction.

The target column (adj_close) gets its own scaler so predictions can be
inverted; all input columns are scaled per-column. Scalers are fitted on
the training region only (everything but the last 20 target rows) and
``window_dataset`` re-derives them to assert nothing leaked.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from ..indicators import FEATURE_COLUMNS, FeatureTable

TEST_ROWS = 20
TARGET_COLUMN = "adj_close"


class ScalingError(ValueError):
    pass


class LeakageError(RuntimeError):
    """Raised when scaler state does not match a train-only fit."""


@dataclass
class ScalerPair:
    target_min: float
    target_max: float
    feature_names: tuple[str, ...]
    feature_min: np.ndarray
    feature_max: np.ndarray

    def transform_features(self, m: np.ndarray) -> np.ndarray:
        return (m - self.feature_min) / (self.feature_max - self.feature_min)

    def transform_target(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_min) / (self.target_max - self.target_min)

    def inverse_target(self, y: np.ndarray) -> np.ndarray:
        return y * (self.target_max - self.target_min) + self.target_min


@dataclass
class WindowedDataset:
    X_train: np.ndarray  # (n_train, lookback, n_features)
    y_train: np.ndarray  # scaled targets
    X_test: np.ndarray
    y_test: np.ndarray
    lookback: int
    feature_names: tuple[str, ...]
    scalers: ScalerPair
    train_dates: list[date]
    test_dates: list[date]

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


def variant_columns(with_score: bool, with_topic_score: bool) -> tuple[str, ...]:
    cols = list(FEATURE_COLUMNS)
    if with_score:
        cols.append("score")
    if with_topic_score:
        cols.append("score_topic")
    return tuple(cols)


def _assemble(
    features: FeatureTable,
    score: dict[date, float] | None,
    topic_score: dict[date, float] | None,
    with_score: bool,
    with_topic_score: bool,
) -> tuple[np.ndarray, tuple[str, ...]]:
    names = variant_columns(with_score, with_topic_score)
    columns = []
    for name in names:
        if name == "score":
            if score is None:
                raise ScalingError("score column requested but no daily scores supplied")
            columns.append(np.array([score.get(d, 0.0) for d in features.dates]))
        elif name == "score_topic":
            if topic_score is None:
                raise ScalingError("score_topic column requested but no topic scores supplied")
            columns.append(np.array([topic_score.get(d, 0.0) for d in features.dates]))
        else:
            columns.append(np.asarray(features.columns[name], dtype=np.float64))
    return np.column_stack(columns), names


def fit_scalers(matrix: np.ndarray, names: tuple[str, ...], target_index: int) -> ScalerPair:
    """Min-max state from training rows only; constant columns are rejected."""
    lo = matrix.min(axis=0)
    hi = matrix.max(axis=0)
    flat = np.where(hi <= lo)[0]
    if flat.size:
        raise ScalingError(f"constant column in training region: {names[int(flat[0])]!r}")
    return ScalerPair(
        target_min=float(lo[target_index]),
        target_max=float(hi[target_index]),
        feature_names=names,
        feature_min=lo,
        feature_max=hi,
    )


def window_dataset(
    features: FeatureTable,
    lookback: int,
    with_score: bool = False,
    with_topic_score: bool = False,
    score: dict[date, float] | None = None,
    topic_score: dict[date, float] | None = None,
    scalers: ScalerPair | None = None,
    test_rows: int = TEST_ROWS,
) -> WindowedDataset:
    """Window scaled rows into (lookback -> next-day adj_close) samples.

    Sample t covers rows [t-lookback+1, t] and predicts the scaled target
    at t+1; the last ``test_rows`` targets form the test split. Supplied
    scalers must equal a train-only fit (leakage guard).
    """
    matrix, names = _assemble(features, score, topic_score, with_score, with_topic_score)
    n = matrix.shape[0]
    if n < lookback + test_rows + 1:
        raise ScalingError(f"need >= {lookback + test_rows + 1} rows, got {n}")
    target_index = names.index(TARGET_COLUMN)

    train_fit = fit_scalers(matrix[: n - test_rows], names, target_index)
    if scalers is None:
        scalers = train_fit
    else:
        same = (
            scalers.feature_names == train_fit.feature_names
            and np.array_equal(scalers.feature_min, train_fit.feature_min)
            and np.array_equal(scalers.feature_max, train_fit.feature_max)
            and scalers.target_min == train_fit.target_min
            and scalers.target_max == train_fit.target_max
        )
        if not same:
            raise LeakageError("supplied scalers differ from a train-only fit")

    scaled = scalers.transform_features(matrix)
    targets = scalers.transform_target(matrix[:, target_index])

    xs, ys, dates = [], [], []
    for t in range(lookback - 1, n - 1):
        xs.append(scaled[t - lookback + 1 : t + 1])
        ys.append(targets[t + 1])
        dates.append(features.dates[t + 1])
    x_all = np.stack(xs)
    y_all = np.array(ys)

    n_test = test_rows
    return WindowedDataset(
        X_train=x_all[:-n_test],
        y_train=y_all[:-n_test],
        X_test=x_all[-n_test:],
        y_test=y_all[-n_test:],
        lookback=lookback,
        feature_names=names,
        scalers=scalers,
        train_dates=dates[:-n_test],
        test_dates=dates[-n_test:],
    )
