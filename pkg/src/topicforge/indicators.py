"""Derived price features: moving averages, MACD, rolling volatility, bands, momentum.

All rolling indicators mark their warm-up region with NaN; ``build_features``
drops leading rows until every column is defined and reports the count.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .ingest import BarSeries

# Canonical column order for the assembled table (dates excluded).
FEATURE_COLUMNS = (
    "open",
    "high",
    "low",
    "close",
    "adj_close",
    "volume",
    "ma7",
    "ma20",
    "macd",
    "sd20",
    "upper_band",
    "lower_band",
    "ema",
    "log_momentum",
)

MACD_FAST = 12
MACD_SLOW = 26
EMA_SPAN = 20  # standalone EMA column; matches the 20-day context of the bands
BOLLINGER_K = 2.0

# Minimum bars: MACD warm-up plus headroom for the fixed 20-row test split.
MIN_BARS = MACD_SLOW + 20


class IndicatorError(ValueError):
    pass


@dataclass
class FeatureTable:
    dates: list[date]
    columns: dict[str, np.ndarray]
    warmup_dropped: int

    def __len__(self) -> int:
        return len(self.dates)

    def matrix(self, names: tuple[str, ...] | list[str]) -> np.ndarray:
        return np.column_stack([self.columns[n] for n in names])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("date," + ",".join(FEATURE_COLUMNS) + "\n")
            for i, d in enumerate(self.dates):
                cells = [repr(float(self.columns[c][i])) for c in FEATURE_COLUMNS]
                fh.write(d.isoformat() + "," + ",".join(cells) + "\n")


def moving_average(series: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over ``window`` points; first window-1 entries are NaN.

    Each window is averaged directly (not via a running cumsum) so the
    error stays at the ulp of one window sum regardless of series length.
    """
    series = np.asarray(series, dtype=float)
    if window < 1:
        raise IndicatorError(f"window must be >= 1, got {window}")
    if window > series.size:
        raise IndicatorError(f"window {window} exceeds series length {series.size}")
    out = np.full(series.size, np.nan)
    windows = np.lib.stride_tricks.sliding_window_view(series, window)
    out[window - 1 :] = windows.mean(axis=1)
    return out


def ema(series: np.ndarray, span: int) -> np.ndarray:
    """Exponential moving average, alpha = 2/(span+1), seeded at series[0]."""
    series = np.asarray(series, dtype=float)
    if span < 1:
        raise IndicatorError(f"span must be >= 1, got {span}")
    if series.size == 0:
        raise IndicatorError("empty series")
    alpha = 2.0 / (span + 1)
    out = np.empty_like(series)
    out[0] = series[0]
    for i in range(1, series.size):
        out[i] = alpha * series[i] + (1 - alpha) * out[i - 1]
    return out


def macd(series: np.ndarray) -> np.ndarray:
    """12-day EMA minus 26-day EMA; the first 25 entries are NaN (warm-up)."""
    series = np.asarray(series, dtype=float)
    if series.size < MACD_SLOW:
        raise IndicatorError(f"need >= {MACD_SLOW} points for MACD, got {series.size}")
    out = ema(series, MACD_FAST) - ema(series, MACD_SLOW)
    out[: MACD_SLOW - 1] = np.nan
    return out


def rolling_std(series: np.ndarray, window: int = 20) -> np.ndarray:
    """Trailing population standard deviation; first window-1 entries are NaN."""
    series = np.asarray(series, dtype=float)
    if window < 2:
        raise IndicatorError(f"window must be >= 2, got {window}")
    if window > series.size:
        raise IndicatorError(f"window {window} exceeds series length {series.size}")
    out = np.full(series.size, np.nan)
    for i in range(window - 1, series.size):
        chunk = series[i - window + 1 : i + 1]
        out[i] = np.sqrt(np.mean((chunk - chunk.mean()) ** 2))
    return out


def bollinger(ma20: np.ndarray, sd20: np.ndarray, k: float = BOLLINGER_K) -> tuple[np.ndarray, np.ndarray]:
    ma20 = np.asarray(ma20, dtype=float)
    sd20 = np.asarray(sd20, dtype=float)
    if ma20.shape != sd20.shape:
        raise IndicatorError(f"length mismatch: {ma20.shape} vs {sd20.shape}")
    return ma20 + k * sd20, ma20 - k * sd20


def log_momentum(series: np.ndarray, lag: int = 1) -> np.ndarray:
    """Signed log of the ``lag``-day price change: sign(m) * ln(1 + |m|).

    Plain ln(momentum) is undefined for non-positive moves; the signed-log
    transform is total, odd, and monotone in the raw momentum.
    """
    series = np.asarray(series, dtype=float)
    if lag < 1:
        raise IndicatorError(f"lag must be >= 1, got {lag}")
    if lag >= series.size:
        raise IndicatorError(f"lag {lag} >= series length {series.size}")
    out = np.full(series.size, np.nan)
    m = series[lag:] - series[:-lag]
    out[lag:] = np.sign(m) * np.log1p(np.abs(m))
    return out


def build_features(bars: BarSeries, momentum_lag: int = 1) -> FeatureTable:
    """Assemble the full indicator table from one ticker's bars.

    Rolling indicators are computed on ``close``; ``adj_close`` is carried
    through as the prediction target source. Leading rows with any
    undefined column are dropped and counted.
    """
    n = len(bars)
    if n < MIN_BARS:
        raise IndicatorError(f"need >= {MIN_BARS} bars, got {n}")
    tickers = bars.tickers()
    if len(tickers) != 1:
        raise IndicatorError(f"expected a single-ticker series, got {tickers}")

    close = np.array([b.close for b in bars.bars])
    cols: dict[str, np.ndarray] = {
        "open": np.array([b.open for b in bars.bars]),
        "high": np.array([b.high for b in bars.bars]),
        "low": np.array([b.low for b in bars.bars]),
        "close": close,
        "adj_close": np.array([b.adj_close for b in bars.bars]),
        "volume": np.array([float(b.volume) for b in bars.bars]),
        "ma7": moving_average(close, 7),
        "ma20": moving_average(close, 20),
        "macd": macd(close),
        "sd20": rolling_std(close, 20),
        "ema": ema(close, EMA_SPAN),
        "log_momentum": log_momentum(close, momentum_lag),
    }
    cols["upper_band"], cols["lower_band"] = bollinger(cols["ma20"], cols["sd20"])

    defined = ~np.any(np.column_stack([np.isnan(cols[c]) for c in FEATURE_COLUMNS]), axis=1)
    first = int(np.argmax(defined))
    if not defined.any():
        raise IndicatorError("no fully-defined rows after warm-up")
    dates = [b.date for b in bars.bars[first:]]
    trimmed = {c: cols[c][first:].copy() for c in FEATURE_COLUMNS}
    return FeatureTable(dates=dates, columns=trimmed, warmup_dropped=first)


def load_features_csv(path) -> FeatureTable:
    """Inverse of FeatureTable.to_csv (warmup_dropped is not persisted)."""
    from datetime import date as _date

    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = ["date"] + list(FEATURE_COLUMNS)
        if header != expected:
            raise IndicatorError(f"{path}: unexpected feature columns {header}")
        dates = []
        rows = []
        for line in fh:
            cells = line.rstrip("\n").split(",")
            dates.append(_date.fromisoformat(cells[0]))
            rows.append([float(x) for x in cells[1:]])
    arr = np.array(rows)
    cols = {c: arr[:, i].copy() for i, c in enumerate(FEATURE_COLUMNS)}
    return FeatureTable(dates=dates, columns=cols, warmup_dropped=0)
