"""Lexicon-and-rules sentiment scoring plus an external score provider.

The built-in engine is a compact valence-lexicon scorer with the
canonical rule constants (negation flip, all-caps emphasis, booster
words, trailing-exclamation amplification, alpha-normalised compound).
Scores from a richer external model can be loaded from CSV instead and
used interchangeably downstream.
"""

from __future__ import annotations

import csv
import math
import string
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

# Rule constants, kept together so the engine's behaviour is auditable.
NORMALIZATION_ALPHA = 15.0  # compound = S / sqrt(S^2 + alpha)
NEGATION_FACTOR = -0.74  # flip-and-damp multiplier for negated valences
CAPS_BOOST = 0.733  # all-caps emphasis, added toward the valence sign
EXCLAIM_INCREMENT = 0.292  # per trailing '!', added toward the sum's sign
MAX_EXCLAIMS = 4
NEGATION_WINDOW = 3  # negator may sit up to 3 tokens before the hit
BOOSTER_WINDOW = 2  # boosters act up to 2 tokens back

VALENCE_MIN, VALENCE_MAX = -4.0, 4.0

POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


class SentimentError(ValueError):
    pass


@dataclass(frozen=True)
class SentimentScore:
    pos: float
    neu: float
    neg: float
    compound: float


@dataclass
class Lexicon:
    entries: dict[str, float]
    boosters: dict[str, float]
    negators: frozenset[str]


def _data_path(name: str):
    return resources.files("topicforge").joinpath("data", name)


def load_lexicon(
    path: str | Path | None = None,
    boosters_path: str | Path | None = None,
    negators_path: str | Path | None = None,
) -> Lexicon:
    """Load the valence lexicon plus booster/negator word lists.

    The lexicon file is tab-separated ``token<TAB>valence`` with valences
    in [-4, 4]. With no arguments the bundled data files are used.
    """
    entries = _load_valence_file(path if path is not None else _data_path("lexicon.txt"), "lexicon")
    if not entries:
        raise SentimentError("lexicon file contains no entries")
    bad = {t: v for t, v in entries.items() if not VALENCE_MIN <= v <= VALENCE_MAX}
    if bad:
        tok, v = next(iter(bad.items()))
        raise SentimentError(f"valence out of [-4, 4] for token {tok!r}: {v}")

    boosters = _load_valence_file(
        boosters_path if boosters_path is not None else _data_path("boosters.txt"), "booster list"
    )
    if not boosters:
        raise SentimentError("booster file contains no entries")

    neg_src = negators_path if negators_path is not None else _data_path("negators.txt")
    negators = frozenset(
        line.strip().lower() for line in _read_text(neg_src).splitlines() if line.strip()
    )
    if not negators:
        raise SentimentError("negator file contains no entries")
    return Lexicon(entries=entries, boosters=boosters, negators=negators)


def _read_text(src) -> str:
    if hasattr(src, "read_text"):
        return src.read_text(encoding="utf-8")
    return Path(src).read_text(encoding="utf-8")


def _load_valence_file(src, label: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for lineno, line in enumerate(_read_text(src).splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise SentimentError(f"{label} line {lineno}: expected token<TAB>value, got {line!r}")
        token = parts[0].strip().lower()
        try:
            value = float(parts[1])
        except ValueError:
            raise SentimentError(f"{label} line {lineno}: non-numeric value {parts[1]!r}") from None
        if token in out:
            warnings.warn(f"{label}: duplicate token {token!r} at line {lineno}, last value wins")
        out[token] = value
    return out


def _tokens(text: str) -> list[str]:
    """Whitespace split with edge punctuation stripped (inner apostrophes kept)."""
    toks = []
    for raw in text.split():
        t = raw.strip(string.punctuation)
        if t:
            toks.append(t)
    return toks


def _caps_differential(tokens: list[str]) -> bool:
    n_upper = sum(1 for t in tokens if t.isupper())
    return 0 < n_upper < len(tokens)


def _trailing_exclaims(text: str) -> int:
    t = text.rstrip()
    n = 0
    while n < len(t) and t[-1 - n] == "!":
        n += 1
    return n


def score_comment(text: str, lexicon: Lexicon) -> SentimentScore:
    """Score one (cleaned) comment.

    Each lexicon hit contributes its valence, adjusted in order by
    all-caps emphasis, nearby boosters, and a preceding negator; the
    summed valence S gains trailing-'!' emphasis toward its own sign and
    is normalised to compound = S / sqrt(S^2 + alpha). Empty text is
    fully neutral.
    """
    toks = _tokens(text)
    if not toks:
        return SentimentScore(pos=0.0, neu=1.0, neg=0.0, compound=0.0)
    lower = [t.lower() for t in toks]
    caps_differ = _caps_differential(toks)

    contributions: list[float] = []
    for i, tok in enumerate(toks):
        low = lower[i]
        if low in lexicon.boosters or low not in lexicon.entries:
            contributions.append(0.0)
            continue
        v = lexicon.entries[low]
        if v != 0.0 and caps_differ and tok.isupper():
            v += math.copysign(CAPS_BOOST, v)
        for j in range(max(0, i - BOOSTER_WINDOW), i):
            inc = lexicon.boosters.get(lower[j])
            if inc is not None and v != 0.0:
                v += inc if v > 0 else -inc
        if any(lower[j] in lexicon.negators for j in range(max(0, i - NEGATION_WINDOW), i)):
            v *= NEGATION_FACTOR
        contributions.append(v)

    s = float(sum(contributions))
    if s != 0.0:
        s += math.copysign(min(_trailing_exclaims(text), MAX_EXCLAIMS) * EXCLAIM_INCREMENT, s)
    compound = s / math.sqrt(s * s + NORMALIZATION_ALPHA)
    compound = max(-1.0, min(1.0, compound))

    pos_sum = sum(c + 1.0 for c in contributions if c > 0)
    neg_sum = sum(c - 1.0 for c in contributions if c < 0)
    neu_count = float(sum(1 for c in contributions if c == 0))
    total = pos_sum + abs(neg_sum) + neu_count
    return SentimentScore(
        pos=pos_sum / total,
        neu=neu_count / total,
        neg=abs(neg_sum) / total,
        compound=compound,
    )


def classify(compound: float) -> str:
    if compound >= POSITIVE_THRESHOLD:
        return "Positive"
    if compound <= NEGATIVE_THRESHOLD:
        return "Negative"
    return "Neutral"


def daily_score(day_scores: list[SentimentScore], weights: list[float] | None = None) -> float:
    """Mean compound over a day's comments; an empty day is neutral (0)."""
    if not day_scores:
        return 0.0
    compounds = [s.compound for s in day_scores]
    if weights is None:
        return float(sum(compounds) / len(compounds))
    if len(weights) != len(day_scores):
        raise SentimentError("weights length must match scores length")
    wsum = float(sum(weights))
    if wsum <= 0:
        raise SentimentError("weights must sum to a positive value")
    return float(sum(w * c for w, c in zip(weights, compounds)) / wsum)


class ExternalScores:
    """Per-comment compound scores computed out-of-process (e.g. a transformer)."""

    def __init__(self, by_id: dict[str, float]):
        self._by_id = by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, comment_id: str) -> bool:
        return comment_id in self._by_id

    def compound(self, comment_id: str) -> float:
        try:
            return self._by_id[comment_id]
        except KeyError:
            raise SentimentError(f"no external score for comment id {comment_id!r}") from None


def load_external_scores(path: str | Path) -> ExternalScores:
    """Load a ``comment_id,compound`` CSV; compounds must lie in [-1, 1]."""
    p = Path(path)
    if not p.exists():
        raise SentimentError(f"external score file not found: {p}")
    by_id: dict[str, float] = {}
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["comment_id", "compound"]:
            raise SentimentError(f"{p}: expected header 'comment_id,compound', got {header}")
        for rownum, row in enumerate(reader, start=1):
            if len(row) < 2:
                raise SentimentError(f"{p} row {rownum}: expected 2 fields, got {len(row)}")
            cid = row[0].strip()
            try:
                value = float(row[1])
            except ValueError:
                raise SentimentError(f"{p} row {rownum}: non-numeric compound {row[1]!r}") from None
            if not -1.0 <= value <= 1.0:
                raise SentimentError(f"{p} row {rownum}: compound {value} outside [-1, 1]")
            if cid in by_id:
                raise SentimentError(f"{p} row {rownum}: duplicate comment id {cid!r}")
            by_id[cid] = value
    return ExternalScores(by_id)


def load_stopwords(path: str | Path | None = None) -> set[str]:
    """Bundled (or custom) stop-word list for the topic vocabulary."""
    src = path if path is not None else _data_path("stopwords.txt")
    return {line.strip().lower() for line in _read_text(src).splitlines() if line.strip()}
