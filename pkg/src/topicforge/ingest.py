"""CSV ingestion: comment and bar parsing, text cleaning, trading-day alignment.

Comment files carry one timestamped message per row (Date / Tweet /
Stock Name / Company Name); bar files carry daily OHLCV rows. Malformed
rows never abort a run: they are collected into row-level error reports
so callers can surface them.
"""

from __future__ import annotations

import csv
import hashlib
import re
from bisect import bisect_left
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

COMMENT_COLUMNS = ("Date", "Tweet", "Stock Name", "Company Name")
BAR_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume", "Stock Name")

_TICKER_RE = re.compile(r"^[A-Z0-9]+$")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_CASHTAG_RE = re.compile(r"\$([A-Za-z][A-Za-z0-9]*)")
_WS_RE = re.compile(r"\s+")


class IngestError(Exception):
    """Unrecoverable ingestion failure (missing file/column, broken series)."""


@dataclass(frozen=True)
class CommentRecord:
    comment_id: str
    date: datetime  # timezone-aware, UTC
    text: str  # raw text as found in the file
    stock_name: str
    company_name: str


@dataclass(frozen=True)
class Bar:
    date: date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int
    stock_name: str


@dataclass(frozen=True)
class RowError:
    row: int  # 1-based data row number (header excluded)
    reason: str


@dataclass
class CommentParse:
    records: list[CommentRecord]
    malformed: list[RowError]
    empty_dropped: int  # rows whose text cleans to the empty string
    total_rows: int


@dataclass
class BarSeries:
    bars: list[Bar]

    def __len__(self) -> int:
        return len(self.bars)

    def tickers(self) -> list[str]:
        seen: dict[str, None] = {}
        for b in self.bars:
            seen.setdefault(b.stock_name, None)
        return list(seen)

    def for_ticker(self, ticker: str) -> "BarSeries":
        return BarSeries([b for b in self.bars if b.stock_name == ticker])

    def dates(self) -> list[date]:
        return [b.date for b in self.bars]


@dataclass
class BarParse:
    series: BarSeries
    malformed: list[RowError]
    total_rows: int


@dataclass
class DayBucket:
    date: date
    doc_indices: list[int]  # positions into AlignedCorpus.docs


@dataclass
class AlignedCorpus:
    """Per-ticker corpus of cleaned comments bucketed by trading day.

    ``docs`` holds every valid comment for the ticker in file order
    (including comments past the last bar, which belong to the corpus
    but to no day); ``days`` holds only days that received comments.
    """

    ticker: str
    doc_ids: list[str]
    docs: list[str]
    days: list[DayBucket]
    bars: BarSeries
    dropped_after_last_bar: int = 0

    def day_texts(self) -> list[tuple[date, list[str]]]:
        return [(d.date, [self.docs[i] for i in d.doc_indices]) for d in self.days]

    def flatten(self) -> list[CommentRecord]:
        """Rebuild comment records dated at their assigned trading day."""
        out = []
        for bucket in self.days:
            stamp = datetime(bucket.date.year, bucket.date.month, bucket.date.day, tzinfo=timezone.utc)
            for i in bucket.doc_indices:
                out.append(
                    CommentRecord(
                        comment_id=self.doc_ids[i],
                        date=stamp,
                        text=self.docs[i],
                        stock_name=self.ticker,
                        company_name="",
                    )
                )
        return out


def clean_text(raw: str) -> str:
    """Strip URLs and @mentions, bare cashtags ($NIO -> NIO), collapse whitespace.

    Casing and punctuation are preserved: both carry sentiment signal.
    """
    s = _URL_RE.sub(" ", raw)
    s = _MENTION_RE.sub(" ", s)
    s = _CASHTAG_RE.sub(r"\1", s)
    return _WS_RE.sub(" ", s).strip()


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    p = Path(path)
    if not p.exists():
        raise IngestError(f"input file not found: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"empty file (no header): {p}") from None
        return header, list(reader)


def _column_map(header: list[str], required: tuple[str, ...], path: str | Path) -> dict[str, int]:
    cols = {name: i for i, name in enumerate(header)}
    missing = [c for c in required if c not in cols]
    if missing:
        raise IngestError(f"{path}: missing required column(s): {', '.join(missing)}")
    return cols


def parse_comments(path: str | Path) -> CommentParse:
    """Parse a comments CSV. Malformed rows go to the error report, in file order."""
    header, rows = _read_rows(path)
    cols = _column_map(header, COMMENT_COLUMNS, path)
    if "Index" in cols:
        id_col = cols["Index"]
    elif header and header[0] == "":
        id_col = 0
    else:
        id_col = None

    records: list[CommentRecord] = []
    malformed: list[RowError] = []
    seen_ids: set[str] = set()
    empty_dropped = 0
    for ordinal, row in enumerate(rows):
        rownum = ordinal + 1
        if len(row) != len(header):
            malformed.append(RowError(rownum, f"expected {len(header)} fields, got {len(row)}"))
            continue
        try:
            stamp = datetime.strptime(row[cols["Date"]], "%Y-%m-%d %H:%M:%S%z")
        except ValueError:
            malformed.append(RowError(rownum, f"unparseable timestamp: {row[cols['Date']]!r}"))
            continue
        stamp = stamp.astimezone(timezone.utc)
        ticker = row[cols["Stock Name"]].strip()
        if not _TICKER_RE.match(ticker):
            malformed.append(RowError(rownum, f"invalid stock name: {ticker!r}"))
            continue
        comment_id = row[id_col].strip() if id_col is not None else str(ordinal)
        if comment_id in seen_ids:
            malformed.append(RowError(rownum, f"duplicate comment id: {comment_id!r}"))
            continue
        text = row[cols["Tweet"]]
        if not clean_text(text):
            empty_dropped += 1
            continue
        seen_ids.add(comment_id)
        records.append(
            CommentRecord(
                comment_id=comment_id,
                date=stamp,
                text=text,
                stock_name=ticker,
                company_name=row[cols["Company Name"]],
            )
        )
    return CommentParse(records, malformed, empty_dropped, total_rows=len(rows))


def parse_bars(path: str | Path) -> BarParse:
    """Parse a bar CSV into a per-ticker date-ascending series.

    Row-level defects (non-numeric price, high < low, negative volume) are
    reported and the row excluded; a duplicate (ticker, date) pair breaks
    the series contract and raises.
    """
    header, rows = _read_rows(path)
    cols = _column_map(header, BAR_COLUMNS, path)

    bars: list[Bar] = []
    malformed: list[RowError] = []
    seen: set[tuple[str, date]] = set()
    for ordinal, row in enumerate(rows):
        rownum = ordinal + 1
        if len(row) != len(header):
            malformed.append(RowError(rownum, f"expected {len(header)} fields, got {len(row)}"))
            continue
        try:
            day = datetime.strptime(row[cols["Date"]], "%Y-%m-%d").date()
        except ValueError:
            malformed.append(RowError(rownum, f"unparseable date: {row[cols['Date']]!r}"))
            continue
        try:
            o, h, lo, c, ac = (float(row[cols[k]]) for k in ("Open", "High", "Low", "Close", "Adj Close"))
            vol = int(float(row[cols["Volume"]]))
        except ValueError:
            malformed.append(RowError(rownum, "non-numeric price or volume"))
            continue
        if vol < 0:
            malformed.append(RowError(rownum, f"negative volume: {vol}"))
            continue
        if lo > min(o, c) or h < max(o, c):
            malformed.append(RowError(rownum, f"price bounds violated: low={lo} high={h} open={o} close={c}"))
            continue
        ticker = row[cols["Stock Name"]].strip()
        if not _TICKER_RE.match(ticker):
            malformed.append(RowError(rownum, f"invalid stock name: {ticker!r}"))
            continue
        key = (ticker, day)
        if key in seen:
            raise IngestError(f"{path}: duplicate bar for {ticker} on {day} (row {rownum})")
        seen.add(key)
        bars.append(Bar(day, o, h, lo, c, ac, vol, ticker))

    bars.sort(key=lambda b: (b.stock_name, b.date))
    return BarParse(BarSeries(bars), malformed, total_rows=len(rows))


def align(comments: list[CommentRecord], bars: BarSeries, ticker: str) -> AlignedCorpus:
    """Assign each of the ticker's comments to a trading day.

    A comment on a non-trading day rolls forward to the next trading day
    (a weekend post can only influence the next session). Comments dated
    after the last bar are kept in the corpus but assigned to no day.
    """
    mine = [c for c in comments if c.stock_name == ticker]
    series = bars.for_ticker(ticker)
    if not len(series):
        raise IngestError(f"ticker {ticker!r} absent from bars")
    # zero comments is a valid (empty) corpus; only missing bars break alignment

    bar_dates = series.dates()
    doc_ids = [c.comment_id for c in mine]
    docs = [clean_text(c.text) for c in mine]

    buckets: dict[date, list[int]] = {}
    dropped = 0
    for idx, c in enumerate(mine):
        day = c.date.astimezone(timezone.utc).date()
        pos = bisect_left(bar_dates, day)
        if pos == len(bar_dates):
            dropped += 1
            continue
        buckets.setdefault(bar_dates[pos], []).append(idx)

    days = [DayBucket(d, buckets[d]) for d in sorted(buckets)]
    return AlignedCorpus(ticker, doc_ids, docs, days, series, dropped)


def corpus_hash(doc_ids: list[str], docs: list[str]) -> str:
    """SHA-256 over ``id<TAB>text<LF>`` lines in corpus order (hex digest)."""
    h = hashlib.sha256()
    for i, t in zip(doc_ids, docs):
        h.update(f"{i}\t{t}\n".encode("utf-8"))
    return h.hexdigest()


def comments_to_csv(records: list[CommentRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(("Index",) + COMMENT_COLUMNS)
        for r in records:
            w.writerow(
                [
                    r.comment_id,
                    r.date.astimezone(timezone.utc).strftime("%Y-%m-%d %H:%M:%S+00:00"),
                    r.text,
                    r.stock_name,
                    r.company_name,
                ]
            )


def bars_to_csv(bars: list[Bar], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(BAR_COLUMNS)
        for b in bars:
            w.writerow(
                [
                    b.date.isoformat(),
                    repr(b.open),
                    repr(b.high),
                    repr(b.low),
                    repr(b.close),
                    repr(b.adj_close),
                    b.volume,
                    b.stock_name,
                ]
            )
