"""Reporting and evaluation: summary statistics, precision@k, Cohen's kappa.

Annotations live in an append-only JSON-lines file, one record per line;
when an annotator relabels a candidate the latest record wins but the
history stays on disk.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import BOOK_INDEX
from .detector import CandidateId, ChiasmusCandidate
from .errors import AnnotationCoverageError, AnnotationError


class Label(str, Enum):
    """Three-class annotation rubric."""

    CHIASTIC = "chiastic"
    NON_CHIASTIC = "non_chiastic"
    NONE = "none"


@dataclass(frozen=True)
class AnnotationRecord:
    candidate_id: CandidateId
    annotator: str
    label: Label
    ts: str = ""

    def to_json(self) -> dict:
        return {
            "candidate_id": self.candidate_id.to_json(),
            "annotator": self.annotator,
            "label": self.label.value,
            "ts": self.ts,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationRecord":
        try:
            candidate_id = CandidateId.from_json(obj["candidate_id"])
            annotator = str(obj["annotator"])
            label = Label(obj["label"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed annotation record: {exc}") from None
        if not annotator:
            raise ValueError("malformed annotation record: empty annotator")
        return cls(candidate_id, annotator, label, str(obj.get("ts", "")))


def read_annotations(text: str) -> tuple[list[AnnotationRecord], str | None]:
    """Parse an annotation file's content.

    Returns (records, partial_tail). A final chunk without a trailing
    newline that does not parse is treated as an interrupted write and
    returned as partial_tail rather than an error; any newline-terminated
    bad line raises AnnotationError with its line number.
    """
    records: list[AnnotationRecord] = []
    partial: str | None = None
    lines = text.split("\n")
    terminated = text.endswith("\n")
    for idx, line in enumerate(lines):
        if line == "":
            continue
        is_last = idx == len(lines) - 1
        try:
            records.append(AnnotationRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, ValueError) as exc:
            if is_last and not terminated:
                partial = line
            else:
                raise AnnotationError(f"line {idx + 1}: {exc}") from None
    return records, partial


def append_annotation(path: str, record: AnnotationRecord) -> None:
    """Append one record durably (flush + fsync)."""
    with open(path, "a", encoding="utf-8") as out:
        out.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
        out.flush()
        os.fsync(out.fileno())


def latest_labels(records: Iterable[AnnotationRecord]) -> dict[str, dict[str, Label]]:
    """Latest label per candidate, keyed annotator -> candidate key."""
    by_annotator: dict[str, dict[str, Label]] = {}
    for record in records:
        by_annotator.setdefault(record.annotator, {})[record.candidate_id.key()] = record.label
    return by_annotator


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Chance-corrected agreement between two parallel label lists.

    Expected agreement uses each annotator's own marginal distribution.
    When both annotators are constant and identical (p_e = 1 with
    p_o = 1) the agreement is defined as 1.0.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}")
    if not labels_a:
        raise ValueError("label lists must be non-empty")
    a = [getattr(x, "value", x) for x in labels_a]
    b = [getattr(x, "value", x) for x in labels_b]
    n = len(a)
    p_o = sum(x == y for x, y in zip(a, b)) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    p_e = sum(counts_a[c] * counts_b.get(c, 0) for c in counts_a) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def precision_at_k(ranked_ids: Sequence[str], records: Iterable[AnnotationRecord], k: int) -> float:
    """Fraction of the top-k candidates labeled chiastic by both annotators.

    Requires exactly two annotators and a label from each on every top-k
    candidate; missing coverage raises AnnotationCoverageError naming the
    candidates. When fewer than k candidates exist the available ones are
    used and the denominator shrinks to match.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    top = list(ranked_ids)[:k]
    if not top:
        raise ValueError("no candidates to evaluate")
    by_annotator = latest_labels(records)
    if len(by_annotator) != 2:
        raise AnnotationError(f"need labels from exactly 2 annotators, got {sorted(by_annotator)}")
    (labels_a, labels_b) = (by_annotator[name] for name in sorted(by_annotator))
    missing = [cid for cid in top if cid not in labels_a or cid not in labels_b]
    if missing:
        raise AnnotationCoverageError(missing)
    hits = sum(1 for cid in top if labels_a[cid] is Label.CHIASTIC and labels_b[cid] is Label.CHIASTIC)
    return hits / len(top)


@dataclass(frozen=True)
class GranularityStats:
    num_found: int
    top_book: str | None
    avg_length: float | None
    std_length: float | None
    avg_score: float | None
    std_score: float | None
    per_book: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "num_found": self.num_found,
            "top_book": self.top_book,
            "avg_length": self.avg_length,
            "std_length": self.std_length,
            "avg_score": self.avg_score,
            "std_score": self.std_score,
            "per_book": dict(self.per_book),
        }


@dataclass(frozen=True)
class SummaryStats:
    by_granularity: dict[str, GranularityStats]
    total: int

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "by_granularity": {g: s.to_json() for g, s in self.by_granularity.items()},
        }


def _book_order(book: str) -> tuple[int, str]:
    return (BOOK_INDEX.get(book, len(BOOK_INDEX)), book)


def summarize(candidates: Sequence[ChiasmusCandidate]) -> SummaryStats:
    """Per-granularity counts, per-book histogram, and length/score stats.

    Standard deviations are population deviations; an empty input yields
    an empty-stats marker rather than an error.
    """
    groups: dict[str, list[ChiasmusCandidate]] = {}
    for c in candidates:
        groups.setdefault(c.granularity, []).append(c)

    by_granularity: dict[str, GranularityStats] = {}
    for granularity in sorted(groups):
        members = groups[granularity]
        lengths = np.array([c.length for c in members], dtype=np.float64)
        finals = np.array([c.score.final for c in members], dtype=np.float64)
        counts = Counter(c.book for c in members)
        top_book = min(counts, key=lambda b: (-counts[b], _book_order(b)))
        per_book = {book: counts[book] for book in sorted(counts, key=_book_order)}
        by_granularity[granularity] = GranularityStats(
            num_found=len(members),
            top_book=top_book,
            avg_length=float(lengths.mean()),
            std_length=float(lengths.std()),
            avg_score=float(finals.mean()),
            std_score=float(finals.std()),
            per_book=per_book,
        )
    return SummaryStats(by_granularity=by_granularity, total=len(candidates))


@dataclass(frozen=True)
class AgreementSummary:
    """Agreement between two annotators over the top-k candidates."""

    k: int
    annotators: tuple[str, ...]
    n_overlap: int
    kappa: float | None
    precision_at_k: float | None
    missing: tuple[str, ...]
    reason: str | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "annotators": list(self.annotators),
            "n_overlap": self.n_overlap,
            "kappa": self.kappa,
            "precision_at_k": self.precision_at_k,
            "missing": list(self.missing),
            "reason": self.reason,
        }


def agreement_summary(ranked_ids: Sequence[str], records: Iterable[AnnotationRecord], k: int) -> AgreementSummary:
    """Kappa over the doubly-labeled top-k, precision@k once coverage is full.

    Unlike precision_at_k this never raises on partial coverage: kappa is
    computed on whatever overlap exists and precision stays None until
    both annotators cover the whole top-k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    top = list(ranked_ids)[:k]
    by_annotator = latest_labels(records)
    names = tuple(sorted(by_annotator))
    if len(names) != 2:
        return AgreementSummary(
            k=len(top), annotators=names, n_overlap=0, kappa=None, precision_at_k=None,
            missing=tuple(top), reason=f"need exactly 2 annotators, have {len(names)}",
        )
    labels_a, labels_b = by_annotator[names[0]], by_annotator[names[1]]
    overlap = [cid for cid in top if cid in labels_a and cid in labels_b]
    missing = tuple(cid for cid in top if cid not in labels_a or cid not in labels_b)
    kappa = cohen_kappa([labels_a[c] for c in overlap], [labels_b[c] for c in overlap]) if overlap else None
    precision = None
    if top and not missing:
        hits = sum(1 for cid in top if labels_a[cid] is Label.CHIASTIC and labels_b[cid] is Label.CHIASTIC)
        precision = hits / len(top)
    reason = None if overlap else "no candidates labeled by both annotators yet"
    return AgreementSummary(
        k=len(top), annotators=names, n_overlap=len(overlap), kappa=kappa,
        precision_at_k=precision, missing=missing, reason=reason,
    )


REPORT_FORMAT = "chiasmos-report-v1"

_GRANULARITY_TITLES = {"half": "Half-Verse", "verse": "Verse", "unit": "Unit"}


def build_report(
    candidates: Sequence[ChiasmusCandidate],
    *,
    ranked_ids: Sequence[str] | None = None,
    records: Sequence[AnnotationRecord] | None = None,
    k: int = 50,
    manifest_path: str | None = None,
) -> dict:
    """Assemble the report document: summary stats, per-book counts, and,
    when annotations are supplied, strict precision@k and kappa over the
    top-k (full coverage required)."""
    stats = summarize(candidates)
    report: dict = {
        "format": REPORT_FORMAT,
        "summary": stats.to_json(),
        "per_book_counts": {g: dict(s.per_book) for g, s in stats.by_granularity.items()},
    }
    if manifest_path is not None:
        report["manifest_path"] = manifest_path
    if records is not None:
        if ranked_ids is None:
            raise ValueError("ranked candidate ids are required to evaluate annotations")
        top = list(ranked_ids)[:k]
        precision = precision_at_k(top, records, k)
        by_annotator = latest_labels(records)
        names = sorted(by_annotator)
        kappa = cohen_kappa(
            [by_annotator[names[0]][cid] for cid in top],
            [by_annotator[names[1]][cid] for cid in top],
        )
        report["annotation"] = {
            "annotators": names,
            "k": len(top),
            "precision_at_k": precision,
            "kappa": kappa,
        }
    return report


def render_report_text(report: Mapping) -> str:
    """Plain-text summary table, one column per granularity."""
    summary = report["summary"]["by_granularity"]
    order = [g for g in ("half", "verse") if g in summary] + [g for g in sorted(summary) if g not in ("half", "verse")]
    if not order:
        return "No candidates.\n"

    def fmt_pm(avg, std):
        return f"{avg:.2f} +/- {std:.2f}" if avg is not None else "-"

    rows: list[tuple[str, list[str]]] = [
        ("Num. Found", [str(summary[g]["num_found"]) for g in order]),
        ("Top Book", [str(summary[g]["top_book"]) for g in order]),
        ("Avg. Length", [fmt_pm(summary[g]["avg_length"], summary[g]["std_length"]) for g in order]),
        ("Avg. Score", [fmt_pm(summary[g]["avg_score"], summary[g]["std_score"]) for g in order]),
    ]
    annotation = report.get("annotation")
    if annotation:
        rows.append((f"Precision@{annotation['k']}", [f"{annotation['precision_at_k']:.2f}"] + [""] * (len(order) - 1)))
        rows.append(("Cohen Kappa", [f"{annotation['kappa']:.2f}"] + [""] * (len(order) - 1)))

    headers = ["Metric"] + [_GRANULARITY_TITLES.get(g, g) for g in order]
    table = [headers] + [[name] + cells for name, cells in rows]
    widths = [max(len(r[col]) for r in table) for col in range(len(headers))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
