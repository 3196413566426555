"""Document embeddings: EMB1 binary file I/O and a deterministic fallback embedder.

The encoder itself runs out-of-process; this module only loads its EMB1
output, or produces hashed TF-IDF random-projection vectors so that the
whole pipeline can run self-contained.

EMB1 layout (little-endian throughout)::

    offset size  field
    0      4     magic b"EMB1"
    4      4     u32 n_docs
    8      4     u32 dim
    12     1     u8 normalized flag (0/1)
    13     4*n*d float32 row-major matrix
    ...          n_docs doc-id lines, UTF-8, each terminated by \\n;
                 optional trailing '#'-prefixed metadata lines

Example (n=1, d=2, normalized, row [1.0, 0.0], id "7")::

    45 4d 42 31 | 01 00 00 00 | 02 00 00 00 | 01 |
    00 00 80 3f  00 00 00 00 | 37 0a
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
HASH_BUCKETS = 1 << 16  # hashed vocabulary size for the fallback embedder
# Rows are stored as float32, so allow a little slack beyond the 1e-6
# float64 norm invariant when validating files.
STORED_NORM_TOLERANCE = 1e-5


class EmbeddingError(ValueError):
    pass


@dataclass
class EmbeddingMatrix:
    rows: np.ndarray  # (n_docs, dim) float
    doc_ids: list[str]
    normalized: bool

    @property
    def n_docs(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])


def save_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    rows = np.ascontiguousarray(matrix.rows, dtype="<f4")
    n, d = rows.shape
    if len(matrix.doc_ids) != n:
        raise EmbeddingError(f"{len(matrix.doc_ids)} doc ids for {n} rows")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", n, d))
        fh.write(struct.pack("<B", 1 if matrix.normalized else 0))
        fh.write(rows.tobytes())
        for doc_id in matrix.doc_ids:
            fh.write(doc_id.encode("utf-8") + b"\n")


def load_embeddings(path: str | Path, expected_ids: list[str] | None = None) -> EmbeddingMatrix:
    """Load an EMB1 file, validating structure, finiteness and (optionally) ids."""
    p = Path(path)
    if not p.exists():
        raise EmbeddingError(f"embedding file not found: {p}")
    blob = p.read_bytes()
    if blob[:4] != MAGIC:
        raise EmbeddingError(f"{p}: bad magic {blob[:4]!r}, expected {MAGIC!r}")
    if len(blob) < 13:
        raise EmbeddingError(f"{p}: truncated header ({len(blob)} bytes)")
    n, d = struct.unpack_from("<II", blob, 4)
    normalized = struct.unpack_from("<B", blob, 12)[0] != 0
    payload_bytes = 4 * n * d
    have = len(blob) - 13
    if have < payload_bytes:
        raise EmbeddingError(f"{p}: truncated payload, expected {payload_bytes} bytes of floats, got {have}")
    rows = np.frombuffer(blob, dtype="<f4", count=n * d, offset=13).reshape(n, d).astype(np.float64)

    bad = np.where(~np.isfinite(rows).all(axis=1))[0]
    if bad.size:
        raise EmbeddingError(f"{p}: non-finite entry in row {int(bad[0])}")

    trailer = blob[13 + payload_bytes :].decode("utf-8")
    lines = trailer.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    doc_ids = lines[:n]
    extra = lines[n:]
    if len(doc_ids) != n:
        raise EmbeddingError(f"{p}: expected {n} doc-id lines, found {len(doc_ids)}")
    if any(not ln.startswith("#") for ln in extra):
        junk = next(ln for ln in extra if not ln.startswith("#"))
        raise EmbeddingError(f"{p}: unexpected trailer line {junk!r}")

    if normalized:
        norms = np.linalg.norm(rows, axis=1)
        off = np.where(np.abs(norms - 1.0) > STORED_NORM_TOLERANCE)[0]
        if off.size:
            raise EmbeddingError(
                f"{p}: normalized flag set but row {int(off[0])} has L2 norm {norms[off[0]]:.6f}"
            )

    if expected_ids is not None and set(doc_ids) != set(expected_ids):
        missing = sorted(set(expected_ids) - set(doc_ids))[:3]
        surplus = sorted(set(doc_ids) - set(expected_ids))[:3]
        raise EmbeddingError(
            f"{p}: doc ids do not match the corpus (missing e.g. {missing}, surplus e.g. {surplus})"
        )
    return EmbeddingMatrix(rows=rows, doc_ids=doc_ids, normalized=normalized)


def _stable_bucket(token: str) -> tuple[int, float]:
    """Deterministic (bucket, sign) pair for a token, stable across runs."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    bucket = value % HASH_BUCKETS
    sign = 1.0 if (value >> 17) & 1 else -1.0
    return bucket, sign


def fallback_embed(corpus: list[str], dim: int = 64, seed: int = 0) -> EmbeddingMatrix:
    """Hashed bag-of-words TF-IDF vectors pushed through a seeded +/-1 projection.

    Identical (corpus, dim, seed) give bit-identical output. Rows are
    L2-normalised. Doc ids default to positional indices; callers that
    track real ids can replace them afterwards.
    """
    if dim < 2:
        raise EmbeddingError(f"dim must be >= 2, got {dim}")
    if not corpus:
        raise EmbeddingError("empty corpus")

    counts: list[dict[int, float]] = []
    df = np.zeros(HASH_BUCKETS)
    for text in corpus:
        doc: dict[int, float] = {}
        for token in text.lower().split():
            bucket, sign = _stable_bucket(token)
            doc[bucket] = doc.get(bucket, 0.0) + sign
        counts.append(doc)
        for bucket in doc:
            df[bucket] += 1.0

    n = len(corpus)
    idf = 1.0 + np.log(n / (1.0 + df))
    rng = np.random.default_rng(seed)
    projection = rng.integers(0, 2, size=(HASH_BUCKETS, dim)).astype(np.float64) * 2.0 - 1.0

    rows = np.zeros((n, dim))
    for i, doc in enumerate(counts):
        for bucket, signed_tf in doc.items():
            rows[i] += signed_tf * idf[bucket] * projection[bucket]
    norms = np.linalg.norm(rows, axis=1)
    norms[norms == 0] = 1.0
    rows /= norms[:, None]
    return EmbeddingMatrix(rows=rows, doc_ids=[str(i) for i in range(n)], normalized=True)
