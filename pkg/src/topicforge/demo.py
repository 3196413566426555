"""Synthetic desk-scale corpus: comments with latent topic groups plus a price
series whose next-day move follows the prior day's topic-group mix.

Three comment populations (earnings chatter, macro chatter, technical
chatter) carry distinct vocabularies. Each trading day draws a latent
bull/bear balance; the realised earnings-vs-macro comment mix that day
drives the next day's return, while per-comment sentiment wording is
noisy. Daily mean sentiment therefore sees the signal through noise, and
the technical-chatter population adds sentiment noise with no price
content, so topic-resolved aggregation has a real edge by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .ingest import Bar, CommentRecord

TICKER = "SYNT"
COMPANY = "Synthetic Industries, Inc."

_EARNINGS_WORDS = ["earnings", "revenue", "quarter", "guidance", "results", "margins", "eps", "outlook", "sales", "demand"]
_MACRO_WORDS = ["fed", "rates", "cpi", "treasury", "yields", "macro", "dollar", "powell", "fomc", "economy"]
_CHATTER_WORDS = ["chart", "options", "calls", "puts", "breakout", "resistance", "pattern", "setup", "flow", "candles"]
_POSITIVE = ["great", "strong", "bullish", "beat", "upgrade", "rally", "profit", "good", "excellent", "win"]
_NEGATIVE = ["terrible", "weak", "bearish", "miss", "downgrade", "selloff", "loss", "bad", "awful", "fear"]
_FILLER = ["today", "tomorrow", "premarket", "afterhours", "open", "close", "week", "month", "session", "print"]

MEAN_RETURN = 0.0002
TOPIC_BETA = 0.015  # return response to the prior day's earnings-vs-macro mix
NOISE_SIGMA = 0.004
MIX_RHO = 0.75  # day-to-day persistence of the latent bull/bear balance


@dataclass
class DemoCorpus:
    comments: list[CommentRecord]
    bars: list[Bar]
    day_mix: list[float]  # realised (earnings - macro) / total per day


def _trading_days(start: date, count: int) -> list[date]:
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def _comment_text(rng: np.random.Generator, group: str, positive: bool) -> str:
    if group == "earnings":
        pool = _EARNINGS_WORDS
    elif group == "macro":
        pool = _MACRO_WORDS
    else:
        pool = _CHATTER_WORDS
    w = rng.choice(len(pool), size=4, replace=False)
    tb = [pool[i] for i in w]
    tone_pool = _POSITIVE if positive else _NEGATIVE
    tone = [tone_pool[int(rng.integers(len(tone_pool)))] for _ in range(2)]
    filler = _FILLER[int(rng.integers(len(_FILLER)))]
    shapes = [
        f"${TICKER} {tb[0]} {tb[1]} {tone[0]}, {tb[2]} {tb[3]} looks {tone[1]} {filler}",
        f"{tone[0].capitalize()} {tb[0]} {tb[1]} for ${TICKER}, {tb[2]} {tb[3]} {tone[1]} {filler}",
        f"${TICKER} {tb[0]} {tb[1]} {tone[0]} {tone[1]} watching {tb[2]} {tb[3]} into the {filler}",
    ]
    return shapes[int(rng.integers(len(shapes)))]


def generate_demo_corpus(seed: int = 7, n_days: int = 250, start_price: float = 150.0) -> DemoCorpus:
    rng = np.random.default_rng(seed)
    days = _trading_days(date(2021, 1, 4), n_days)

    comments: list[CommentRecord] = []
    day_mix: list[float] = []
    balance = 0.0
    next_id = 48000
    for d in days:
        balance = MIX_RHO * balance + np.sqrt(1 - MIX_RHO**2) * rng.normal()
        tilt = float(np.tanh(balance))  # in (-1, 1)
        n_comments = 1 + int(rng.poisson(1.0))
        n_comments = min(n_comments, 4)
        counts = {"earnings": 0, "macro": 0}
        for _ in range(n_comments):
            u = rng.random()
            p_earn = 0.7 * (1 + tilt) / 2
            p_macro = 0.7 * (1 - tilt) / 2
            if u < p_earn:
                group = "earnings"
            elif u < p_earn + p_macro:
                group = "macro"
            else:
                group = "chatter"
            if group == "earnings":
                positive = rng.random() < 0.8
                counts["earnings"] += 1
            elif group == "macro":
                positive = rng.random() < 0.2
                counts["macro"] += 1
            else:
                positive = rng.random() < 0.5
            stamp = datetime(d.year, d.month, d.day, tzinfo=timezone.utc) + timedelta(
                hours=int(rng.integers(13, 21)), minutes=int(rng.integers(60)), seconds=int(rng.integers(60))
            )
            comments.append(
                CommentRecord(
                    comment_id=str(next_id),
                    date=stamp,
                    text=_comment_text(rng, group, positive),
                    stock_name=TICKER,
                    company_name=COMPANY,
                )
            )
            next_id += 1
        day_mix.append((counts["earnings"] - counts["macro"]) / n_comments)

    texts = [c.text for c in comments]
    most_common = max(texts.count(t) for t in set(texts))
    assert most_common < 15, "demo comments must stay below the k-NN duplicate bound"

    closes = [start_price]
    for t in range(1, n_days):
        ret = MEAN_RETURN + TOPIC_BETA * day_mix[t - 1] + NOISE_SIGMA * rng.normal()
        closes.append(closes[-1] * float(np.exp(ret)))

    bars: list[Bar] = []
    prev_close = closes[0]
    for d, close in zip(days, closes):
        open_ = prev_close * float(np.exp(0.002 * rng.normal()))
        hi = max(open_, close) * float(np.exp(abs(0.0015 * rng.normal())))
        lo = min(open_, close) * float(np.exp(-abs(0.0015 * rng.normal())))
        volume = int(4e7 * float(np.exp(0.3 * rng.normal())))
        bars.append(
            Bar(
                date=d,
                open=round(open_, 2),
                high=round(hi, 2),
                low=round(lo, 2),
                close=round(close, 2),
                adj_close=round(close, 2),
                volume=volume,
                stock_name=TICKER,
            )
        )
        prev_close = close
    # rounding can nip high/low inside the open/close range; re-widen
    fixed = []
    for b in bars:
        hi = max(b.high, b.open, b.close)
        lo = min(b.low, b.open, b.close)
        fixed.append(Bar(b.date, b.open, hi, lo, b.close, b.adj_close, b.volume, b.stock_name))
    return DemoCorpus(comments=comments, bars=fixed, day_mix=day_mix)


DEMO_CONFIG_TEMPLATE = """[paths]
comments = {comments}
bars = {bars}
output_dir = {output_dir}

[run]
ticker = SYNT

[topics]
k = 15
out_dim = 5
min_dist = 0.1
epochs_umap = {epochs_umap}
neg_samples = 5
learning_rate = 1.0
min_pts = 10
min_cluster_size = 10
min_df = 2
embed_dim = 64
seed = 42

[forecast]
lookback = 5
epochs = {epochs}
seeds = {seeds}
models = {models}
variants = baseline,sentiment,topic_sentiment
sentiment_engine = lexicon
topic_score_mode = replace

[report]
format = both
"""


def write_demo(
    out_dir: str | Path,
    seed: int = 7,
    n_days: int = 250,
    epochs: int = 200,
    epochs_umap: int = 200,
    seeds: str = "0,1,2,3,4,5,6,7,8,9",
    models: str = "lstm,cnn,cnn_lstm,gan",
) -> Path:
    """Materialise the synthetic corpus plus a ready-to-run config; returns the config path."""
    from .ingest import bars_to_csv, comments_to_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = generate_demo_corpus(seed=seed, n_days=n_days)
    comments_csv = out / "comments.csv"
    bars_csv = out / "bars.csv"
    comments_to_csv(corpus.comments, comments_csv)
    bars_to_csv(corpus.bars, bars_csv)
    config_path = out / "config.ini"
    config_path.write_text(
        DEMO_CONFIG_TEMPLATE.format(
            comments=comments_csv,
            bars=bars_csv,
            output_dir=out / "run",
            epochs=epochs,
            epochs_umap=epochs_umap,
            seeds=seeds,
            models=models,
        ),
        encoding="utf-8",
    )
    return config_path
