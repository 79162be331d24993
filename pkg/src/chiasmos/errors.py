"""Exception types shared across the toolkit."""

from __future__ import annotations


class ChiasmosError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(ChiasmosError):
    """Malformed corpus or unit-table row."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CorpusOrderError(ChiasmosError):
    """References are not in canonical (book, chapter, verse) order."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownBookError(ChiasmosError):
    """Book name not in the canonical 39-book table."""

    def __init__(self, line_no: int, book: str):
        super().__init__(f"line {line_no}: unknown book name {book!r}")
        self.line_no = line_no
        self.book = book


class EmbeddingFileError(ChiasmosError):
    """Embedding file violates the chiasmos-emb-v1 contract."""


class UndefinedSimilarityError(ChiasmosError):
    """Cosine similarity requested against a zero vector."""


class BandRangeError(ChiasmosError):
    """Similarity requested outside the stored band or across books."""


class WindowBoundsError(ChiasmosError):
    """Window crosses a book boundary or exceeds the band width."""


class DegenerateCohortError(ChiasmosError):
    """Standardization cohort too small or with zero variance."""


class AnnotationError(ChiasmosError):
    """Annotation file or record is invalid."""


class AnnotationCoverageError(AnnotationError):
    """Top-k candidates lack labels from one or both annotators."""

    def __init__(self, missing: list[str]):
        shown = ", ".join(missing[:5])
        suffix = "" if len(missing) <= 5 else f" (+{len(missing) - 5} more)"
        super().__init__(f"missing labels for candidates: {shown}{suffix}")
        self.missing = tuple(missing)
