"""Forecast quality metrics, the model x feature-set experiment matrix,
and report/plot emission (markdown, CSV, self-contained SVG)."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .indicators import FeatureTable
from .nn.gan import gan_train
from .nn.scaling import WindowedDataset, window_dataset
from .nn.training import TrainedForecaster, train

VARIANTS = ("baseline", "sentiment", "topic_sentiment")
MODEL_ORDER = ("lstm", "cnn", "cnn_lstm", "gan")
METRIC_ROWS = ("RMSE", "MAE", "R2 Score", "MAPE")


class MetricError(ValueError):
    pass


class ExperimentError(RuntimeError):
    pass


def _check_lengths(y: np.ndarray, yhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape or y.ndim != 1:
        raise MetricError(f"need equal 1-D vectors, got {y.shape} vs {yhat.shape}")
    if y.size == 0:
        raise MetricError("empty vectors")
    return y, yhat


def rmse(y: np.ndarray, yhat: np.ndarray) -> float:
    y, yhat = _check_lengths(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def mae(y: np.ndarray, yhat: np.ndarray) -> float:
    y, yhat = _check_lengths(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def r2(y: np.ndarray, yhat: np.ndarray) -> float:
    y, yhat = _check_lengths(y, yhat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise MetricError("zero variance in y: R^2 undefined")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


def mape(y: np.ndarray, yhat: np.ndarray) -> float:
    """Mean absolute percentage error, in percent."""
    y, yhat = _check_lengths(y, yhat)
    if np.any(y == 0.0):
        raise MetricError("zero target value: MAPE undefined")
    return 100.0 * float(np.mean(np.abs((y - yhat) / y)))


def all_metrics(y: np.ndarray, yhat: np.ndarray) -> dict[str, float]:
    return {"rmse": rmse(y, yhat), "mae": mae(y, yhat), "r2": r2(y, yhat), "mape": mape(y, yhat)}


@dataclass(frozen=True)
class MetricsRow:
    model: str
    variant: str
    sentiment_engine: str
    split: str  # train | test
    rmse: float
    mae: float
    r2: float
    mape: float
    seed: int | None = None  # None marks the median aggregate over seeds


@dataclass
class CellResult:
    model: str
    variant: str
    seeds: list[int]
    forecasters: list[TrainedForecaster]
    dataset: WindowedDataset


@dataclass
class ExperimentReport:
    rows: list[MetricsRow]  # one aggregate row per (model, variant, split)
    config_snapshot: str
    seeds: list[int]
    per_seed: list[MetricsRow] = field(default_factory=list)
    cells: list[CellResult] = field(default_factory=list)
    sentiment_engine: str = "lexicon"

    def aggregate(self, model: str, variant: str, split: str) -> MetricsRow:
        for row in self.rows:
            if row.seed is None and (row.model, row.variant, row.split) == (model, variant, split):
                return row
        raise ExperimentError(f"no aggregate row for {model}/{variant}/{split}")


@dataclass
class ExperimentSettings:
    models: tuple[str, ...] = ("lstm", "cnn", "cnn_lstm", "gan")
    variants: tuple[str, ...] = VARIANTS
    seeds: tuple[int, ...] = tuple(range(10))
    lookback: int = 5
    epochs: int = 200
    sentiment_engine: str = "lexicon"
    topic_score_mode: str = "replace"  # replace | add
    gan_noise_dim: int = 4
    config_snapshot: str = ""


def variant_flags(variant: str, topic_score_mode: str = "replace") -> tuple[bool, bool]:
    """(with_score, with_topic_score) column flags for an experiment variant."""
    if variant == "baseline":
        return False, False
    if variant == "sentiment":
        return True, False
    if variant == "topic_sentiment":
        return (topic_score_mode == "add"), True
    raise ExperimentError(f"unknown variant {variant!r}")


def dataset_for_variant(
    features: FeatureTable,
    score: dict[date, float] | None,
    topic_score: dict[date, float] | None,
    variant: str,
    lookback: int,
    topic_score_mode: str = "replace",
) -> WindowedDataset:
    with_score, with_topic = variant_flags(variant, topic_score_mode)
    if with_score and score is None:
        raise ExperimentError(f"variant {variant!r} needs daily sentiment scores (run the sentiment stage)")
    if with_topic and topic_score is None:
        raise ExperimentError(f"variant {variant!r} needs daily topic scores (run the topics stage)")
    return window_dataset(
        features,
        lookback=lookback,
        with_score=with_score,
        with_topic_score=with_topic,
        score=score,
        topic_score=topic_score,
    )


def train_cell(model: str, dataset: WindowedDataset, epochs: int, seed: int, gan_noise_dim: int = 4) -> TrainedForecaster:
    if model == "gan":
        return gan_train(dataset, epochs=epochs, seed=seed, noise_dim=gan_noise_dim)
    return train(model, dataset, epochs=epochs, seed=seed)


def run_experiment(
    features: FeatureTable,
    score: dict[date, float] | None,
    topic_score: dict[date, float] | None,
    settings: ExperimentSettings,
) -> ExperimentReport:
    """Train every (model, variant) cell over all seeds and aggregate medians."""
    rows: list[MetricsRow] = []
    per_seed: list[MetricsRow] = []
    cells: list[CellResult] = []
    for model in settings.models:
        for variant in settings.variants:
            dataset = dataset_for_variant(
                features, score, topic_score, variant, settings.lookback, settings.topic_score_mode
            )
            forecasters = [
                train_cell(model, dataset, settings.epochs, seed, settings.gan_noise_dim)
                for seed in settings.seeds
            ]
            cells.append(CellResult(model, variant, list(settings.seeds), forecasters, dataset))
            per_split: dict[str, list[dict[str, float]]] = {"train": [], "test": []}
            for seed, fc in zip(settings.seeds, forecasters):
                for split, actual in (
                    ("train", dataset.scalers.inverse_target(dataset.y_train)),
                    ("test", dataset.scalers.inverse_target(dataset.y_test)),
                ):
                    m = all_metrics(actual, fc.predictions[split])
                    per_split[split].append(m)
                    per_seed.append(
                        MetricsRow(model, variant, settings.sentiment_engine, split, seed=seed, **m)
                    )
            for split, ms in per_split.items():
                rows.append(
                    MetricsRow(
                        model,
                        variant,
                        settings.sentiment_engine,
                        split,
                        seed=None,
                        **{k: float(np.median([m[k] for m in ms])) for k in ("rmse", "mae", "r2", "mape")},
                    )
                )
    return ExperimentReport(
        rows=rows,
        config_snapshot=settings.config_snapshot,
        seeds=list(settings.seeds),
        per_seed=per_seed,
        cells=cells,
        sentiment_engine=settings.sentiment_engine,
    )


def _column_title(model: str, variant: str, engine: str) -> str:
    base = {"lstm": "LSTM", "cnn": "CNN", "cnn_lstm": "CNN-LSTM", "gan": "GAN"}[model]
    eng = {"lexicon": "Vader", "external": "Bert"}.get(engine, engine)
    if variant == "baseline":
        return base
    if variant == "sentiment":
        return f"{base}({eng})"
    return f"{base}({eng}&TOPIC)"


def _report_grid(report: ExperimentReport) -> tuple[list[str], dict[str, dict[tuple[str, str], float]]]:
    """Column titles plus {split: {(metric, title): value}} lookup."""
    models = [m for m in MODEL_ORDER if any(r.model == m for r in report.rows)]
    titles: list[str] = []
    columns: list[tuple[str, str]] = []
    for model in models:
        for variant in VARIANTS:
            if any(r.model == model and r.variant == variant for r in report.rows):
                titles.append(_column_title(model, variant, report.sentiment_engine))
                columns.append((model, variant))
    grid: dict[str, dict[tuple[str, str], float]] = {"train": {}, "test": {}}
    for split in ("train", "test"):
        for title, (model, variant) in zip(titles, columns):
            try:
                agg = report.aggregate(model, variant, split)
            except ExperimentError:
                continue
            grid[split][("RMSE", title)] = agg.rmse
            grid[split][("MAE", title)] = agg.mae
            grid[split][("R2 Score", title)] = agg.r2
            grid[split][("MAPE", title)] = agg.mape
    return titles, grid


def _best_titles(titles: list[str], grid_split: dict[tuple[str, str], float], metric: str) -> set[str]:
    """Per model group, the column with the best value for the metric."""
    groups: dict[str, list[str]] = {}
    for t in titles:
        groups.setdefault(t.split("(")[0], []).append(t)
    best: set[str] = set()
    for members in groups.values():
        scored = [(grid_split.get((metric, t)), t) for t in members]
        scored = [(v, t) for v, t in scored if v is not None]
        if len(scored) < 2:
            continue
        pick = max(scored)[1] if metric == "R2 Score" else min(scored)[1]
        best.add(pick)
    return best


def emit_report(report: ExperimentReport, fmt: str = "markdown") -> str:
    """Render the aggregate table (Train Set / Test Set sections, one column
    per model-variant pair); markdown bolds the better cell per model group."""
    if not report.rows:
        raise ExperimentError("empty report")
    titles, grid = _report_grid(report)
    splits = [s for s in ("train", "test") if grid[s]]

    if fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(["TITLE"] + titles) + "\n")
        for split in splits:
            buf.write(",".join([f"{split.title()} Set"] + [""] * len(titles)) + "\n")
            for metric in METRIC_ROWS:
                cells = [f"{grid[split][(metric, t)]:.3f}" if (metric, t) in grid[split] else "" for t in titles]
                buf.write(",".join([metric] + cells) + "\n")
        return buf.getvalue()

    if fmt != "markdown":
        raise ExperimentError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    buf.write("# Performance Evaluation Metrics\n\n")
    if report.config_snapshot:
        buf.write("## Configuration\n\n```\n" + report.config_snapshot.rstrip() + "\n```\n\n")
    buf.write(f"Seeds: {', '.join(str(s) for s in report.seeds)} (median aggregate)\n\n")
    buf.write("| " + " | ".join(["TITLE"] + titles) + " |\n")
    buf.write("|" + "---|" * (len(titles) + 1) + "\n")
    for split in splits:
        buf.write("| " + " | ".join([f"{split.title()} Set"] + [""] * len(titles)) + " |\n")
        for metric in METRIC_ROWS:
            bold = _best_titles(titles, grid[split], metric)
            cells = []
            for t in titles:
                if (metric, t) not in grid[split]:
                    cells.append("")
                    continue
                text = f"{grid[split][(metric, t)]:.3f}"
                cells.append(f"**{text}**" if t in bold else text)
            buf.write("| " + " | ".join([metric] + cells) + " |\n")
    return buf.getvalue()


# ---------------------------------------------------------------- SVG plots

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 800, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def emit_plot(series: dict[str, tuple[list, list[float]]], path, title: str = "", x_label: str = "", y_label: str = "") -> None:
    """Write a self-contained SVG line chart; one polyline per named series.

    Series x values may be dates or numbers; all series must be non-empty.
    """
    if not series:
        raise MetricError("no series to plot")
    for name, (xs, ys) in series.items():
        if len(xs) == 0 or len(xs) != len(ys):
            raise MetricError(f"series {name!r} is empty or mismatched")

    def as_float(x) -> float:
        return float(x.toordinal()) if isinstance(x, date) else float(x)

    all_x = [as_float(x) for _, (xs, _) in series.items() for x in xs]
    all_y = [float(y) for _, (_, ys) in series.items() for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    first_xs = next(iter(series.values()))[0]
    dates_axis = len(first_xs) > 0 and isinstance(first_xs[0], date)

    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">\n')
    out.write(f'<rect width="{_W}" height="{_H}" fill="white"/>\n')
    if title:
        out.write(f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>\n')
    out.write(
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>\n'
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>\n'
    )
    for tick in _ticks(y_lo, y_hi):
        out.write(
            f'<text x="{_ML - 6}" y="{py(tick) + 4:.1f}" text-anchor="end" font-size="11">{tick:.2f}</text>\n'
        )
    for tick in _ticks(x_lo, x_hi):
        label = date.fromordinal(int(round(tick))).isoformat() if dates_axis else f"{tick:.0f}"
        out.write(
            f'<text x="{px(tick):.1f}" y="{_H - _MB + 18}" text-anchor="middle" font-size="11">{label}</text>\n'
        )
    if x_label:
        out.write(f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-size="12">{x_label}</text>\n')
    if y_label:
        out.write(
            f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 16 {_H / 2:.1f})">{y_label}</text>\n'
        )
    for idx, (name, (xs, ys)) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{px(as_float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(xs, ys))
        out.write(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>\n')
        ly = _MT + 16 * idx
        out.write(f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 126}" y2="{ly}" stroke="{color}" stroke-width="2"/>\n')
        out.write(f'<text x="{_W - _MR - 120}" y="{ly + 4}" font-size="12">{name}</text>\n')
    out.write("</svg>\n")
    data = out.getvalue()
    if len(data.encode("utf-8")) > 200_000:
        raise MetricError("SVG exceeds the 200 KB budget")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data)


def metrics_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write("model,variant,sentiment_engine,split,seed,rmse,mae,r2,mape\n")
    for row in report.rows + report.per_seed:
        seed = "" if row.seed is None else str(row.seed)
        buf.write(
            f"{row.model},{row.variant},{row.sentiment_engine},{row.split},{seed},"
            f"{row.rmse!r},{row.mae!r},{row.r2!r},{row.mape!r}\n"
        )
    return buf.getvalue()
