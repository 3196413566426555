"""Declarative run configuration: INI-style sections, validated in one pass.

Validation is not fail-fast: every violated invariant is reported so a
bad config can be fixed in one round. Unknown keys warn (forward
compatibility) instead of failing.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .evaluation import VARIANTS
from .nn.models import MODEL_TAGS

KNOWN_KEYS = {
    "paths": {"comments", "bars", "lexicon", "embeddings", "external_scores", "output_dir"},
    "run": {"ticker"},
    "topics": {
        "k",
        "out_dim",
        "min_dist",
        "epochs_umap",
        "neg_samples",
        "learning_rate",
        "min_pts",
        "min_cluster_size",
        "min_df",
        "embed_dim",
        "seed",
        "n_top_words",
    },
    "forecast": {
        "lookback",
        "epochs",
        "seeds",
        "models",
        "variants",
        "sentiment_engine",
        "topic_score_mode",
        "gan_noise_dim",
        "weight_by_length",
    },
    "report": {"format"},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    comments: Path
    bars: Path
    output_dir: Path
    ticker: str
    lexicon: Path | None = None
    embeddings: Path | None = None
    external_scores: Path | None = None
    # topic stage
    k: int = 15
    out_dim: int = 5
    min_dist: float = 0.1
    epochs_umap: int = 200
    neg_samples: int = 5
    learning_rate: float = 1.0
    min_pts: int = 10
    min_cluster_size: int = 10
    min_df: int = 2
    embed_dim: int = 64
    seed: int = 42
    n_top_words: int = 10
    # forecast stage
    lookback: int = 5
    epochs: int = 200
    seeds: tuple[int, ...] = tuple(range(10))
    models: tuple[str, ...] = ("lstm", "cnn", "cnn_lstm", "gan")
    variants: tuple[str, ...] = VARIANTS
    sentiment_engine: str = "lexicon"
    topic_score_mode: str = "replace"
    gan_noise_dim: int = 4
    weight_by_length: bool = False
    # report stage
    report_format: str = "both"
    snapshot: str = field(default="", repr=False)


def _get(parser: configparser.ConfigParser, section: str, key: str, default=None):
    if parser.has_option(section, key):
        value = parser.get(section, key).strip()
        return value if value else default
    return default


def validate_config(path: str | Path) -> tuple[RunConfig | None, list[str], list[str]]:
    """Parse + validate; returns (config or None, errors, warnings)."""
    p = Path(path)
    errors: list[str] = []
    warnings: list[str] = []
    if not p.exists():
        return None, [f"config file not found: {p}"], []
    parser = configparser.ConfigParser()
    try:
        snapshot = p.read_text(encoding="utf-8")
        parser.read_string(snapshot)
    except (configparser.Error, UnicodeDecodeError) as exc:
        return None, [f"unreadable config: {exc}"], []

    for section in parser.sections():
        if section not in KNOWN_KEYS:
            warnings.append(f"unknown section [{section}] ignored")
            continue
        for key in parser[section]:
            if key not in KNOWN_KEYS[section]:
                warnings.append(f"unknown key {section}.{key} ignored")

    def require_path(section: str, key: str, must_exist: bool = True) -> Path | None:
        raw = _get(parser, section, key)
        if raw is None:
            errors.append(f"missing required {section}.{key}")
            return None
        value = Path(raw)
        if must_exist and not value.exists():
            errors.append(f"{section}.{key}: file not found: {value}")
        return value

    def optional_path(section: str, key: str) -> Path | None:
        raw = _get(parser, section, key)
        if raw is None:
            return None
        value = Path(raw)
        if not value.exists():
            errors.append(f"{section}.{key}: file not found: {value}")
        return value

    def number(section: str, key: str, default, cast, check=None, describe=""):
        raw = _get(parser, section, key)
        if raw is None:
            return default
        try:
            value = cast(raw)
        except ValueError:
            errors.append(f"{section}.{key}: expected {cast.__name__}, got {raw!r}")
            return default
        if check is not None and not check(value):
            errors.append(f"{section}.{key}: {describe or 'out of range'} (got {value})")
        return value

    comments = require_path("paths", "comments")
    bars = require_path("paths", "bars")
    out_raw = _get(parser, "paths", "output_dir")
    if out_raw is None:
        errors.append("missing required paths.output_dir")
    output_dir = Path(out_raw) if out_raw else Path(".")
    lexicon = optional_path("paths", "lexicon")
    embeddings = optional_path("paths", "embeddings")
    external_scores = optional_path("paths", "external_scores")

    ticker = _get(parser, "run", "ticker")
    if not ticker:
        errors.append("missing required run.ticker")
        ticker = ""

    cfg_kwargs = dict(
        k=number("topics", "k", 15, int, lambda v: v >= 2, "must be >= 2"),
        out_dim=number("topics", "out_dim", 5, int, lambda v: v >= 2, "must be >= 2"),
        min_dist=number("topics", "min_dist", 0.1, float, lambda v: 0 < v < 2, "must be in (0, 2)"),
        epochs_umap=number("topics", "epochs_umap", 200, int, lambda v: v >= 1, "must be >= 1"),
        neg_samples=number("topics", "neg_samples", 5, int, lambda v: v >= 1, "must be >= 1"),
        learning_rate=number("topics", "learning_rate", 1.0, float, lambda v: v > 0, "must be > 0"),
        min_pts=number("topics", "min_pts", 10, int, lambda v: v >= 1, "must be >= 1"),
        min_cluster_size=number("topics", "min_cluster_size", 10, int, lambda v: v >= 2, "must be >= 2"),
        min_df=number("topics", "min_df", 2, int, lambda v: v >= 1, "must be >= 1"),
        embed_dim=number("topics", "embed_dim", 64, int, lambda v: v >= 2, "must be >= 2"),
        seed=number("topics", "seed", 42, int),
        n_top_words=number("topics", "n_top_words", 10, int, lambda v: v >= 1, "must be >= 1"),
        lookback=number("forecast", "lookback", 5, int, lambda v: v >= 1, "must be >= 1"),
        epochs=number("forecast", "epochs", 200, int, lambda v: v >= 1, "must be >= 1"),
        gan_noise_dim=number("forecast", "gan_noise_dim", 4, int, lambda v: v >= 1, "must be >= 1"),
    )

    seeds_raw = _get(parser, "forecast", "seeds", "0,1,2,3,4,5,6,7,8,9")
    try:
        seeds = tuple(int(s) for s in seeds_raw.split(",") if s.strip() != "")
    except ValueError:
        errors.append(f"forecast.seeds: expected comma-separated integers, got {seeds_raw!r}")
        seeds = ()
    if not seeds:
        errors.append("forecast.seeds: must be non-empty")

    models_raw = _get(parser, "forecast", "models", "lstm,cnn,cnn_lstm,gan")
    models = tuple(m.strip() for m in models_raw.split(",") if m.strip())
    bad_models = [m for m in models if m not in MODEL_TAGS]
    if bad_models:
        errors.append(f"forecast.models: unknown model(s) {bad_models}; choose from {sorted(MODEL_TAGS)}")
    if not models:
        errors.append("forecast.models: must be non-empty")

    variants_raw = _get(parser, "forecast", "variants", ",".join(VARIANTS))
    variants = tuple(v.strip() for v in variants_raw.split(",") if v.strip())
    bad_variants = [v for v in variants if v not in VARIANTS]
    if bad_variants:
        errors.append(f"forecast.variants: unknown variant(s) {bad_variants}; choose from {list(VARIANTS)}")
    if not variants:
        errors.append("forecast.variants: must be non-empty")

    engine = _get(parser, "forecast", "sentiment_engine", "lexicon")
    if engine not in ("lexicon", "external"):
        errors.append(f"forecast.sentiment_engine: must be 'lexicon' or 'external', got {engine!r}")
    if engine == "external" and external_scores is None:
        errors.append("forecast.sentiment_engine=external requires paths.external_scores")

    mode = _get(parser, "forecast", "topic_score_mode", "replace")
    if mode not in ("replace", "add"):
        errors.append(f"forecast.topic_score_mode: must be 'replace' or 'add', got {mode!r}")

    weight_raw = _get(parser, "forecast", "weight_by_length", "false")
    weight_by_length = str(weight_raw).lower() in ("1", "true", "yes", "on")

    fmt = _get(parser, "report", "format", "both")
    if fmt not in ("markdown", "csv", "both"):
        errors.append(f"report.format: must be markdown, csv or both, got {fmt!r}")

    if errors:
        return None, errors, warnings
    return (
        RunConfig(
            comments=comments,
            bars=bars,
            output_dir=output_dir,
            ticker=ticker,
            lexicon=lexicon,
            embeddings=embeddings,
            external_scores=external_scores,
            seeds=seeds,
            models=models,
            variants=variants,
            sentiment_engine=engine,
            topic_score_mode=mode,
            weight_by_length=weight_by_length,
            report_format=fmt,
            snapshot=snapshot,
            **cfg_kwargs,
        ),
        [],
        warnings,
    )
