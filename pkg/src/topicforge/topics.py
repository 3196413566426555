"""Topic statistics over cluster labels: c-TF-IDF weights, top words, sentiment.

Documents sharing a cluster label are treated as one merged class
document. A term's weight in class c is TF(t, c) * ln(N / (1 + DF(t)))
where N counts non-outlier classes and DF(t) counts classes containing
the term, so words frequent in one class but rare elsewhere dominate its
representation. Outlier documents (label -1) are excluded from all class
statistics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date

import numpy as np

from .clusterer import ClusterLabels
from .ingest import AlignedCorpus

_TOKEN_RE = re.compile(r"[a-z0-9]{2,}")

OUTLIER = -1


class TopicError(ValueError):
    pass


@dataclass
class Vocabulary:
    tokens: list[str]  # sorted unique kept terms
    index: dict[str, int]
    doc_term_counts: list[dict[int, int]]  # per doc: term index -> count
    stop_words: set[str]
    min_df: int


@dataclass
class TopicModel:
    labels: ClusterLabels
    vocab: Vocabulary
    ctfidf: np.ndarray  # (n_topics, n_terms)
    top_words: dict[int, list[tuple[str, float]]]
    topic_sentiment: dict[int, float]
    topic_sizes: dict[int, int]


def tokenize(text: str) -> list[str]:
    """Lowercased maximal alphanumeric runs of length >= 2."""
    return _TOKEN_RE.findall(text.lower())


def build_vocabulary(corpus: list[str], stop_words: set[str] | None = None, min_df: int = 1) -> Vocabulary:
    if not corpus:
        raise TopicError("empty corpus")
    stop = {w.lower() for w in stop_words} if stop_words else set()

    raw_counts: list[dict[str, int]] = []
    df: dict[str, int] = {}
    for text in corpus:
        counts: dict[str, int] = {}
        for tok in tokenize(text):
            if tok in stop:
                continue
            counts[tok] = counts.get(tok, 0) + 1
        raw_counts.append(counts)
        for tok in counts:
            df[tok] = df.get(tok, 0) + 1

    kept = sorted(t for t, d in df.items() if d >= min_df)
    if not kept:
        raise TopicError("vocabulary is empty after stop-word and min_df filtering")
    index = {t: i for i, t in enumerate(kept)}
    doc_term_counts = [
        {index[t]: c for t, c in counts.items() if t in index} for counts in raw_counts
    ]
    return Vocabulary(tokens=kept, index=index, doc_term_counts=doc_term_counts, stop_words=stop, min_df=min_df)


def _topic_ids(labels: ClusterLabels) -> list[int]:
    return sorted(set(labels.labels.tolist()) - {OUTLIER})


def class_term_matrix(vocab: Vocabulary, labels: ClusterLabels) -> tuple[np.ndarray, list[int]]:
    """Dense (n_topics, n_terms) term counts, outlier docs excluded."""
    topics = _topic_ids(labels)
    if not topics:
        raise TopicError("no non-outlier classes")
    row_of = {t: i for i, t in enumerate(topics)}
    tf = np.zeros((len(topics), len(vocab.tokens)))
    for doc_idx, counts in enumerate(vocab.doc_term_counts):
        lab = int(labels.labels[doc_idx])
        if lab == OUTLIER:
            continue
        row = row_of[lab]
        for term_idx, c in counts.items():
            tf[row, term_idx] += c
    return tf, topics


def class_tf(vocab: Vocabulary, labels: ClusterLabels, term: str, topic: int) -> int:
    """Occurrences of ``term`` across all documents labelled ``topic``."""
    if term not in vocab.index:
        raise TopicError(f"unknown term {term!r}")
    if topic == OUTLIER or topic not in set(labels.labels.tolist()):
        raise TopicError(f"unknown or outlier class {topic}")
    tf, topics = class_term_matrix(vocab, labels)
    return int(tf[topics.index(topic), vocab.index[term]])


def icf(vocab: Vocabulary, labels: ClusterLabels, term: str) -> float:
    """ln(N / (1 + DF)) with N = non-outlier class count; may be negative."""
    if term not in vocab.index:
        raise TopicError(f"unknown term {term!r}")
    tf, topics = class_term_matrix(vocab, labels)
    df = int(np.count_nonzero(tf[:, vocab.index[term]]))
    return math.log(len(topics) / (1.0 + df))


def ctfidf(vocab: Vocabulary, labels: ClusterLabels) -> tuple[np.ndarray, list[int]]:
    """Elementwise TF * ICF matrix over (non-outlier topic, term)."""
    tf, topics = class_term_matrix(vocab, labels)
    n = len(topics)
    df = np.count_nonzero(tf, axis=0).astype(float)
    weights = tf * np.log(n / (1.0 + df))[None, :]
    return weights, topics


def top_words(weights: np.ndarray, topics: list[int], vocab: Vocabulary, topic: int, n: int = 10) -> list[tuple[str, float]]:
    """Top-n terms of a topic by weight, ties broken alphabetically."""
    if topic not in topics:
        raise TopicError(f"unknown topic {topic}")
    row = weights[topics.index(topic)]
    ranked = sorted(zip(vocab.tokens, row.tolist()), key=lambda tw: (-tw[1], tw[0]))
    return ranked[: min(n, len(ranked))]


def topic_sentiment(labels: ClusterLabels, compounds: np.ndarray) -> dict[int, float]:
    """Mean compound over each topic's member documents (outliers get none)."""
    compounds = np.asarray(compounds, dtype=float)
    if compounds.size != labels.labels.size:
        raise TopicError("need one compound score per document")
    out: dict[int, float] = {}
    for t in _topic_ids(labels):
        members = labels.labels == t
        assert members.any(), f"topic {t} has no members"
        out[t] = float(compounds[members].mean())
    return out


def build_topic_model(
    corpus: list[str],
    labels: ClusterLabels,
    compounds: np.ndarray,
    stop_words: set[str] | None = None,
    min_df: int = 1,
    n_top_words: int = 10,
) -> TopicModel:
    vocab = build_vocabulary(corpus, stop_words, min_df)
    weights, topics = ctfidf(vocab, labels)
    tops = {t: top_words(weights, topics, vocab, t, n_top_words) for t in topics}
    sentiments = topic_sentiment(labels, compounds)
    sizes = {t: int(np.sum(labels.labels == t)) for t in topics}
    return TopicModel(
        labels=labels,
        vocab=vocab,
        ctfidf=weights,
        top_words=tops,
        topic_sentiment=sentiments,
        topic_sizes=sizes,
    )


def daily_topic_score(
    aligned: AlignedCorpus, model: TopicModel, compounds: np.ndarray
) -> dict[date, float]:
    """Per-day mean of each comment's topic sentiment (the ``score_topic`` series).

    Outlier comments fall back to their own compound; days without
    comments are absent (callers treat missing days as neutral 0).
    """
    compounds = np.asarray(compounds, dtype=float)
    if compounds.size != len(aligned.docs):
        raise TopicError("need one compound score per corpus document")
    out: dict[date, float] = {}
    for bucket in aligned.days:
        values = []
        for idx in bucket.doc_indices:
            lab = int(model.labels.labels[idx])
            if lab == OUTLIER:
                values.append(float(compounds[idx]))
            else:
                values.append(model.topic_sentiment[lab])
        out[bucket.date] = float(np.mean(values)) if values else 0.0
    return out


def topic_report_csv(model: TopicModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("topic_id,size,sentiment,top_words\n")
        for t in sorted(model.topic_sizes):
            words = " ".join(w for w, _ in model.top_words[t])
            fh.write(f"{t},{model.topic_sizes[t]},{model.topic_sentiment[t]!r},{words}\n")
        n_outliers = int(np.sum(model.labels.labels == OUTLIER))
        fh.write(f"{OUTLIER},{n_outliers},,\n")


def assignments_csv(model: TopicModel, doc_ids: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id,topic_id\n")
        for doc_id, lab in zip(doc_ids, model.labels.labels):
            fh.write(f"{doc_id},{int(lab)}\n")
