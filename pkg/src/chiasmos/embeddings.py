"""Embedding storage, cosine similarity, and the banded similarity structure.

The detector never needs the full units-by-units similarity matrix: a
window of length N only compares positions at most N-1 apart, so we store
one array per index gap d in 1..bandwidth. That keeps memory linear in
the corpus size while serving exactly the similarities any window reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .corpus import Corpus
from .errors import BandRangeError, EmbeddingFileError, UndefinedSimilarityError

EMBEDDING_FORMAT = "chiasmos-emb-v1"

# Vectors are renormalized on load when within this distance of unit norm,
# rejected otherwise; stored vectors are exact to _STORE_TOL.
_LOAD_TOL = 1e-3
_STORE_TOL = 1e-4

Ranges = tuple[tuple[str, int, int], ...]


@dataclass
class EmbeddingStore:
    """Unit-id indexed embedding matrix with unit-norm float64 rows."""

    dim: int
    model_id: str
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dim:
            raise ValueError(f"expected vectors of shape (count, {self.dim}), got {self.vectors.shape}")
        norms = np.linalg.norm(self.vectors, axis=1)
        if self.vectors.shape[0] and float(np.max(np.abs(norms - 1.0))) > _STORE_TOL:
            raise ValueError(f"stored vectors must be unit-norm within {_STORE_TOL}")
        self.vectors.setflags(write=False)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def vector(self, unit_id: int) -> np.ndarray:
        return self.vectors[unit_id]


def load_embeddings(source: Iterable[str], expected_units: int) -> EmbeddingStore:
    """Load and validate a chiasmos-emb-v1 file.

    The header line declares dim, model_id and count; every subsequent
    line is one unit record. Vectors within 1e-3 of unit norm are
    renormalized, anything further off is rejected.
    """
    lines = iter(source)
    try:
        header_line = next(lines)
    except StopIteration:
        raise EmbeddingFileError("empty embedding file") from None
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise EmbeddingFileError(f"header is not valid JSON: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != EMBEDDING_FORMAT:
        raise EmbeddingFileError(f"header must declare format {EMBEDDING_FORMAT!r}")
    try:
        dim = int(header["dim"])
        count = int(header["count"])
        model_id = str(header["model_id"])
    except (KeyError, TypeError, ValueError) as exc:
        raise EmbeddingFileError(f"header missing or malformed field: {exc}") from None
    if dim < 1:
        raise EmbeddingFileError(f"header dim must be >= 1, got {dim}")
    if count != expected_units:
        raise EmbeddingFileError(f"file has {count} vectors but the corpus has {expected_units} units")

    vectors = np.empty((count, dim), dtype=np.float64)
    seen = np.zeros(count, dtype=bool)
    for line_no, raw_line in enumerate(lines, start=2):
        line = raw_line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            unit_id = int(record["unit_id"])
            components = record["v"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise EmbeddingFileError(f"line {line_no}: malformed record: {exc}") from None
        if not 0 <= unit_id < count:
            raise EmbeddingFileError(f"line {line_no}: unit_id {unit_id} outside [0, {count})")
        if seen[unit_id]:
            raise EmbeddingFileError(f"line {line_no}: duplicate unit_id {unit_id}")
        if len(components) != dim:
            raise EmbeddingFileError(f"line {line_no}: unit {unit_id} has {len(components)} components, header dim is {dim}")
        row = np.asarray(components, dtype=np.float64)
        if not np.isfinite(row).all():
            raise EmbeddingFileError(f"line {line_no}: unit {unit_id} has a non-finite component")
        vectors[unit_id] = row
        seen[unit_id] = True

    if not seen.all():
        missing = np.flatnonzero(~seen)[:5].tolist()
        raise EmbeddingFileError(f"missing vectors for unit_ids {missing} ({int((~seen).sum())} total)")

    norms = np.linalg.norm(vectors, axis=1)
    off = np.abs(norms - 1.0)
    if np.any(off > _LOAD_TOL):
        worst = int(np.argmax(off))
        raise EmbeddingFileError(
            f"unit {worst} has norm {norms[worst]:.6f}, outside the {_LOAD_TOL} renormalization tolerance"
        )
    vectors /= norms[:, None]
    return EmbeddingStore(dim=dim, model_id=model_id, vectors=vectors)


def write_embeddings(out: TextIO, vectors, model_id: str) -> None:
    """Write vectors in chiasmos-emb-v1 format (full float precision)."""
    array = np.asarray(vectors, dtype=np.float64)
    header = {"format": EMBEDDING_FORMAT, "dim": int(array.shape[1]), "model_id": model_id, "count": int(array.shape[0])}
    out.write(json.dumps(header) + "\n")
    for unit_id, row in enumerate(array):
        out.write(json.dumps({"unit_id": unit_id, "v": row.tolist()}) + "\n")


def cosine(u, v) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"vectors must share one dimension, got {u.shape} and {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise UndefinedSimilarityError("cosine similarity is undefined for a zero vector")
    return float(min(1.0, max(-1.0, float(u @ v) / (nu * nv))))


class SimilarityBand:
    """Same-book similarities for every index gap 1..bandwidth.

    Entries are float64 dot products of unit-norm vectors; positions whose
    endpoints fall in different books hold NaN and are never served.
    """

    def __init__(self, diagonals: Sequence[np.ndarray], ranges: Ranges, n_units: int):
        self._diagonals = tuple(diagonals)
        self._ranges = tuple(ranges)
        self._n_units = n_units
        span_ids = np.empty(n_units, dtype=np.int32)
        for idx, (_, start, stop) in enumerate(self._ranges):
            span_ids[start:stop] = idx
        self._span_ids = span_ids

    @property
    def bandwidth(self) -> int:
        return len(self._diagonals)

    @property
    def n_units(self) -> int:
        return self._n_units

    @property
    def ranges(self) -> Ranges:
        return self._ranges

    @property
    def nbytes(self) -> int:
        return sum(d.nbytes for d in self._diagonals)

    def span_index_of(self, unit_id: int) -> int:
        if not 0 <= unit_id < self._n_units:
            raise BandRangeError(f"unit_id {unit_id} outside [0, {self._n_units})")
        return int(self._span_ids[unit_id])

    def diagonal(self, gap: int) -> np.ndarray:
        """Array d with d[i] = similarity(i, i + gap); NaN across books."""
        if not 1 <= gap <= self.bandwidth:
            raise BandRangeError(f"gap {gap} outside stored band 1..{self.bandwidth}")
        return self._diagonals[gap - 1]

    def similarity(self, i: int, j: int) -> float:
        """Stored similarity between units i and j, symmetric in (i, j)."""
        lo, hi = (i, j) if i <= j else (j, i)
        if not 0 <= lo or not hi < self._n_units:
            raise BandRangeError(f"unit pair ({i}, {j}) outside [0, {self._n_units})")
        gap = hi - lo
        if gap == 0 or gap > self.bandwidth:
            raise BandRangeError(f"gap {gap} outside stored band 1..{self.bandwidth}")
        value = self._diagonals[gap - 1][lo]
        if np.isnan(value):
            raise BandRangeError(f"units {lo} and {hi} lie in different books")
        return float(value)

    def entry_count(self) -> int:
        return int(sum(np.isfinite(d).sum() for d in self._diagonals))


def band_from_rows(rows: np.ndarray, ranges: Ranges, bandwidth: int) -> SimilarityBand:
    """Build a SimilarityBand from unit-norm rows and validated ranges."""
    if bandwidth < 1:
        raise ValueError(f"bandwidth must be >= 1, got {bandwidth}")
    rows = np.asarray(rows, dtype=np.float64)
    n = rows.shape[0]
    span_ids = np.empty(n, dtype=np.int32)
    for idx, (_, start, stop) in enumerate(ranges):
        span_ids[start:stop] = idx

    diagonals = []
    for gap in range(1, bandwidth + 1):
        if gap >= n:
            diag = np.empty(0, dtype=np.float64)
        else:
            diag = np.einsum("ij,ij->i", rows[:-gap], rows[gap:])
            np.clip(diag, -1.0, 1.0, out=diag)
            diag[span_ids[:-gap] != span_ids[gap:]] = np.nan
        diag.setflags(write=False)
        diagonals.append(diag)
    return SimilarityBand(diagonals, ranges, n)


def build_band(corpus: Corpus, store: EmbeddingStore, bandwidth: int) -> SimilarityBand:
    """Compute the similarity band a scan over `corpus` will consume."""
    if len(store) != len(corpus):
        raise ValueError(f"store has {len(store)} vectors but the corpus has {len(corpus)} units")
    return band_from_rows(store.vectors, corpus.ranges(), bandwidth)
