"""Window pairing, scoring, corpus-wide scanning, standardization, ranking.

A window of N consecutive units is scored by pairing position i with
position N-1-i (the mirror-image correspondence of a chiasm), averaging
the similarities of those matched pairs, and subtracting the average
similarity over every other position pair inside the window. Scores are
z-scored within a cohort and windows above the threshold are reported.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .corpus import BOOK_INDEX, Corpus, Granularity, VerseRef
from .embeddings import SimilarityBand, band_from_rows
from .errors import DegenerateCohortError, WindowBoundsError
from .validation import check_book_spans, check_unit_vectors


class Cohort(str, Enum):
    """Which windows share one z-score distribution."""

    PER_LENGTH = "per-length"
    POOLED = "pooled"


class OverlapPolicy(str, Enum):
    KEEP_ALL = "keep"
    SUPPRESS_NESTED = "suppress"


class Statistic(str, Enum):
    """Quantity that gets standardized: the pair/non-pair difference, or
    the raw matched-pair mean."""

    FINAL = "final"
    PAIR_MEAN = "pair-mean"


@dataclass(frozen=True)
class PairScheme:
    """Matched and non-matched index pairs inside a window of n_units."""

    n_units: int
    pairs: tuple[tuple[int, int], ...]
    non_pairs: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return len(self.non_pairs)


@lru_cache(maxsize=None)
def pair_scheme(n_units: int) -> PairScheme:
    """Pairing for a window of n_units: position i matches n_units-1-i.

    For odd lengths the center position appears only among non-pairs.
    """
    if n_units < 2:
        raise ValueError(f"window length must be >= 2, got {n_units}")
    pairs = tuple((i, n_units - 1 - i) for i in range(n_units // 2))
    paired = set(pairs)
    non_pairs = tuple(
        (i, j) for i in range(n_units) for j in range(i + 1, n_units) if (i, j) not in paired
    )
    return PairScheme(n_units, pairs, non_pairs)


@dataclass(frozen=True)
class WindowScore:
    mu_chiasmus: float
    mu_non_pair: float
    final: float


@dataclass(frozen=True)
class ChiasmusCandidate:
    """A scored window: N consecutive units inside one book span."""

    book: str
    book_index: int
    start_unit: int
    length: int
    score: WindowScore
    granularity: str
    refs: tuple[VerseRef, ...] = ()
    z: float | None = None

    @property
    def end_unit(self) -> int:
        return self.start_unit + self.length - 1

    def start_ref_label(self) -> str:
        return self.refs[0].label() if self.refs else f"unit {self.start_unit}"


@dataclass(frozen=True)
class CandidateId:
    """Stable identity used to join annotations to candidates.

    Keyed on the reference rather than unit ids so labels survive
    re-embedding and re-detection runs.
    """

    granularity: str
    book: str
    start_ref: str
    n_units: int

    def key(self) -> str:
        return f"{self.granularity}|{self.book}|{self.start_ref}|{self.n_units}"

    def to_json(self) -> dict:
        return {
            "granularity": self.granularity,
            "book": self.book,
            "start_ref": self.start_ref,
            "n_units": self.n_units,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CandidateId":
        try:
            return cls(str(obj["granularity"]), str(obj["book"]), str(obj["start_ref"]), int(obj["n_units"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed candidate_id object: {exc}") from None

    @classmethod
    def of(cls, candidate: ChiasmusCandidate) -> "CandidateId":
        return cls(candidate.granularity, candidate.book, candidate.start_ref_label(), candidate.length)


@dataclass(frozen=True)
class ScanConfig:
    """Scan parameters: window lengths, threshold, and overlap handling."""

    lengths: tuple[int, ...] = (4, 5, 6, 7, 8)
    z_threshold: float = 3.0
    granularity: str | None = None
    overlap_policy: OverlapPolicy = OverlapPolicy.KEEP_ALL

    def __post_init__(self):
        lengths = tuple(sorted({int(n) for n in self.lengths}))
        if not lengths:
            raise ValueError("at least one window length is required")
        if lengths[0] < 4:
            raise ValueError(f"window lengths must be >= 4, got {lengths[0]}")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "overlap_policy", OverlapPolicy(self.overlap_policy))
        if not self.z_threshold > 0:
            raise ValueError(f"z_threshold must be > 0, got {self.z_threshold}")

    @property
    def bandwidth(self) -> int:
        return self.lengths[-1] - 1


def score_window(band: SimilarityBand, start: int, n_units: int) -> WindowScore:
    """Score one window from band entries alone."""
    if n_units < 3:
        raise ValueError(f"window length must be >= 3 for a non-pair baseline, got {n_units}")
    if band.bandwidth < n_units - 1:
        raise WindowBoundsError(f"band of width {band.bandwidth} is too narrow for windows of {n_units} units")
    end = start + n_units - 1
    if start < 0 or end >= band.n_units:
        raise WindowBoundsError(f"window [{start}, {end}] outside corpus of {band.n_units} units")
    if band.span_index_of(start) != band.span_index_of(end):
        raise WindowBoundsError(f"window [{start}, {end}] crosses a book boundary")
    scheme = pair_scheme(n_units)
    pair_sum = 0.0
    for i, j in scheme.pairs:
        pair_sum += band.similarity(start + i, start + j)
    non_sum = 0.0
    for i, j in scheme.non_pairs:
        non_sum += band.similarity(start + i, start + j)
    mu_chiasmus = pair_sum / scheme.k
    mu_non_pair = non_sum / scheme.n
    return WindowScore(mu_chiasmus, mu_non_pair, mu_chiasmus - mu_non_pair)


def _window_means(band: SimilarityBand, start: int, span_len: int, n_units: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pair/non-pair means for every window start in one span."""
    count = span_len - n_units + 1
    if count <= 0:
        empty = np.empty(0, dtype=np.float64)
        return empty, empty
    scheme = pair_scheme(n_units)
    pair_acc = np.zeros(count, dtype=np.float64)
    for i, j in scheme.pairs:
        diag = band.diagonal(j - i)
        pair_acc += diag[start + i : start + i + count]
    non_acc = np.zeros(count, dtype=np.float64)
    for i, j in scheme.non_pairs:
        diag = band.diagonal(j - i)
        non_acc += diag[start + i : start + i + count]
    return pair_acc / scheme.k, non_acc / scheme.n


def _scan_ranges(
    band: SimilarityBand,
    lengths: Sequence[int],
    granularity: str,
    units: Sequence | None,
    threads: int = 1,
) -> list[ChiasmusCandidate]:
    lengths = tuple(lengths)
    if band.bandwidth < lengths[-1] - 1:
        raise WindowBoundsError(f"band of width {band.bandwidth} is too narrow for windows of {lengths[-1]} units")
    tasks = [
        (span_idx, book, start, stop, n)
        for span_idx, (book, start, stop) in enumerate(band.ranges)
        for n in lengths
    ]

    def run(task):
        _, _, start, stop, n = task
        return _window_means(band, start, stop - start, n)

    keys = [(t[0], t[1], t[4]) for t in tasks]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = dict(zip(keys, pool.map(run, tasks)))
    else:
        means = dict(zip(keys, map(run, tasks)))

    candidates: list[ChiasmusCandidate] = []
    for span_idx, (book, start, stop) in enumerate(band.ranges):
        span_len = stop - start
        for offset in range(span_len):
            unit = start + offset
            for n in lengths:
                if offset + n > span_len:
                    continue
                mu_c, mu_np = means[(span_idx, book, n)]
                m_c = float(mu_c[offset])
                m_np = float(mu_np[offset])
                refs = tuple(u.ref for u in units[unit : unit + n]) if units is not None else ()
                candidates.append(
                    ChiasmusCandidate(
                        book=book,
                        book_index=span_idx,
                        start_unit=unit,
                        length=n,
                        score=WindowScore(m_c, m_np, m_c - m_np),
                        granularity=granularity,
                        refs=refs,
                    )
                )
    return candidates


def scan(corpus: Corpus, band: SimilarityBand, config: ScanConfig, threads: int = 1) -> list[ChiasmusCandidate]:
    """Score every in-book window of every configured length.

    Output is deterministic in (book, start, length) order regardless of
    thread count; z is left unset until standardize().
    """
    granularity = config.granularity or corpus.granularity.value
    return _scan_ranges(band, config.lengths, granularity, corpus.units, threads=threads)


def standardize(
    candidates: Sequence[ChiasmusCandidate],
    cohort: Cohort | str = Cohort.PER_LENGTH,
    statistic: Statistic | str = Statistic.FINAL,
) -> list[ChiasmusCandidate]:
    """Fill z-scores within each cohort (population standard deviation).

    Per-length cohorts standardize each window length separately; pooled
    puts every window in one cohort.
    """
    cohort = Cohort(cohort)
    statistic = Statistic(statistic)
    if not candidates:
        return []
    if statistic is Statistic.FINAL:
        values = np.array([c.score.final for c in candidates], dtype=np.float64)
    else:
        values = np.array([c.score.mu_chiasmus for c in candidates], dtype=np.float64)

    groups: dict[object, list[int]] = {}
    for idx, c in enumerate(candidates):
        key = c.length if cohort is Cohort.PER_LENGTH else "pooled"
        groups.setdefault(key, []).append(idx)

    z = np.empty(len(candidates), dtype=np.float64)
    for key, indices in groups.items():
        if len(indices) < 2:
            raise DegenerateCohortError(f"cohort {key!r} has {len(indices)} window(s); need at least 2")
        member = values[indices]
        std = float(member.std())
        if std == 0.0:
            raise DegenerateCohortError(f"cohort {key!r} has zero score variance")
        z[indices] = (member - member.mean()) / std
    return [replace(c, z=float(z[i])) for i, c in enumerate(candidates)]


def _nested(a: ChiasmusCandidate, b: ChiasmusCandidate) -> bool:
    if a.book_index != b.book_index:
        return False
    contains = a.start_unit <= b.start_unit and b.end_unit <= a.end_unit
    contained = b.start_unit <= a.start_unit and a.end_unit <= b.end_unit
    return contains or contained


def select(candidates: Sequence[ChiasmusCandidate], config: ScanConfig) -> list[ChiasmusCandidate]:
    """Keep windows with z above the threshold, ranked by z descending.

    Ties break on (book order, start, length). Under SUPPRESS_NESTED a
    window fully containing or contained in an already-kept one is
    dropped.
    """
    for c in candidates:
        if c.z is None:
            raise ValueError("candidates must be standardized before selection")
    survivors = [c for c in candidates if c.z > config.z_threshold]
    survivors.sort(key=lambda c: (-c.z, c.book_index, c.start_unit, c.length))
    if config.overlap_policy is OverlapPolicy.KEEP_ALL:
        return survivors
    kept: list[ChiasmusCandidate] = []
    for c in survivors:
        if not any(_nested(c, other) for other in kept):
            kept.append(c)
    return kept


def write_candidates_jsonl(
    candidates: Sequence[ChiasmusCandidate],
    out: TextIO,
    *,
    unit_texts: Sequence[str] | None = None,
    unit_translations: Sequence[str] | None = None,
) -> None:
    """Write ranked candidates as JSON lines (reals rounded to 6 places).

    unit_texts and unit_translations are indexed by unit id; when given,
    the per-window slices ride along for display in review tools.
    """
    for c in candidates:
        if not c.refs:
            raise ValueError("candidates need verse references for export")
        row = {
            "id": CandidateId.of(c).key(),
            "book": c.book,
            "start_ref": c.refs[0].label(),
            "end_ref": c.refs[-1].label(),
            "granularity": c.granularity,
            "n_units": c.length,
            "start_unit": c.start_unit,
            "mu_chiasmus": round(float(c.score.mu_chiasmus), 6),
            "mu_non_pair": round(float(c.score.mu_non_pair), 6),
            "final": round(float(c.score.final), 6),
            "z": round(float(c.z), 6),
            "unit_refs": [r.label() for r in c.refs],
        }
        if unit_texts is not None:
            row["unit_texts"] = [unit_texts[u] for u in range(c.start_unit, c.start_unit + c.length)]
        if unit_translations is not None:
            row["unit_translations"] = [
                unit_translations[u] if u < len(unit_translations) else ""
                for u in range(c.start_unit, c.start_unit + c.length)
            ]
        out.write(json.dumps(row, ensure_ascii=False) + "\n")


_ROW_KEYS = ("id", "book", "start_ref", "end_ref", "granularity", "n_units", "mu_chiasmus", "mu_non_pair", "final", "z", "unit_refs")


def read_candidates_jsonl(source: Iterable[str]) -> list[dict]:
    """Read candidate rows back, validating the required fields."""
    rows: list[dict] = []
    for line_no, raw_line in enumerate(source, start=1):
        line = raw_line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {line_no}: not valid JSON: {exc}") from None
        if not isinstance(row, dict):
            raise ValueError(f"line {line_no}: expected a JSON object")
        missing = [k for k in _ROW_KEYS if k not in row]
        if missing:
            raise ValueError(f"line {line_no}: candidate row missing fields {missing}")
        rows.append(row)
    return rows


def candidate_from_row(row: dict, fallback_index: int = 0) -> ChiasmusCandidate:
    """Rebuild a ChiasmusCandidate from a JSONL row."""
    refs = tuple(VerseRef.parse(label) for label in row["unit_refs"])
    book = str(row["book"])
    return ChiasmusCandidate(
        book=book,
        book_index=BOOK_INDEX.get(book, len(BOOK_INDEX) + fallback_index),
        start_unit=int(row.get("start_unit", 0)),
        length=int(row["n_units"]),
        score=WindowScore(float(row["mu_chiasmus"]), float(row["mu_non_pair"]), float(row["final"])),
        granularity=str(row["granularity"]),
        refs=refs,
        z=float(row["z"]),
    )


class ChiasmusDetector(BaseEstimator):
    """Sliding-window chiasmus detector over an embedding matrix.

    Follows the scikit-learn estimator contract: constructor arguments are
    stored verbatim, fit(X) computes the banded similarities and scores
    every window, and predict() returns the ranked windows whose z-score
    clears the threshold. X is a (n_units, dim) matrix of unit-norm rows;
    book_spans (fit kwarg) marks boundaries windows may not cross.

    Parameters
    ----------
    lengths : iterable of int, default (4, 5, 6, 7, 8)
        Window lengths to scan; each must be >= 4.
    z_threshold : float, default 3.0
        Windows are reported when their z-score exceeds this value.
    cohort : {"per-length", "pooled"}, default "per-length"
        Whether each window length is standardized separately.
    overlap : {"keep", "suppress"}, default "keep"
        Suppress drops windows nested inside (or around) a kept window.
    statistic : {"final", "pair-mean"}, default "final"
        Quantity standardized into z-scores.
    n_jobs : int, default 1
        Threads used to score (book span, length) blocks; output is
        identical for any value.
    """

    def __init__(
        self,
        lengths=(4, 5, 6, 7, 8),
        z_threshold=3.0,
        cohort="per-length",
        overlap="keep",
        statistic="final",
        n_jobs=1,
    ):
        self.lengths = lengths
        self.z_threshold = z_threshold
        self.cohort = cohort
        self.overlap = overlap
        self.statistic = statistic
        self.n_jobs = n_jobs

    def _config(self) -> ScanConfig:
        return ScanConfig(
            lengths=tuple(self.lengths),
            z_threshold=self.z_threshold,
            overlap_policy=OverlapPolicy(self.overlap),
        )

    def fit(self, X, y=None, book_spans=None):
        """Score and standardize every window of X.

        Sets band_, candidates_ (all windows with z filled), n_units_ and
        dim_. y is ignored and accepted for pipeline compatibility.
        """
        config = self._config()
        X = check_unit_vectors(X)
        ranges = check_book_spans(book_spans, X.shape[0])
        self.band_ = band_from_rows(X, ranges, config.bandwidth)
        windows = _scan_ranges(self.band_, config.lengths, "unit", None, threads=int(self.n_jobs))
        self.candidates_ = standardize(windows, Cohort(self.cohort), Statistic(self.statistic))
        self.n_units_, self.dim_ = X.shape
        self.book_spans_ = ranges
        return self

    def predict(self, X=None):
        """Ranked above-threshold windows from the fitted corpus.

        X is accepted for interface compatibility and must be None or the
        matrix passed to fit; scores are corpus-level, not per-row.
        """
        if not hasattr(self, "candidates_"):
            raise NotFittedError("ChiasmusDetector must be fitted before calling predict")
        return select(self.candidates_, self._config())

    def fit_predict(self, X, y=None, book_spans=None):
        return self.fit(X, y=y, book_spans=book_spans).predict()
