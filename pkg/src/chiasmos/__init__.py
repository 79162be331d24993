"""Chiasmus detection over versified corpora using embedding similarity."""

__version__ = "0.1.0"

from .analytics import (
    AgreementSummary,
    AnnotationRecord,
    GranularityStats,
    Label,
    SummaryStats,
    agreement_summary,
    build_report,
    cohen_kappa,
    precision_at_k,
    read_annotations,
    render_report_text,
    summarize,
)
from .corpus import (
    ATNACH,
    BOOK_INDEX,
    BOOKS,
    Corpus,
    Granularity,
    Half,
    TextUnit,
    VerseRef,
    parse_corpus,
    read_unit_table,
    segment_half_verses,
    strip_pointing,
    write_unit_table,
)
from .detector import (
    CandidateId,
    ChiasmusCandidate,
    ChiasmusDetector,
    Cohort,
    OverlapPolicy,
    PairScheme,
    ScanConfig,
    Statistic,
    WindowScore,
    candidate_from_row,
    pair_scheme,
    read_candidates_jsonl,
    scan,
    score_window,
    select,
    standardize,
    write_candidates_jsonl,
)
from .embeddings import (
    EMBEDDING_FORMAT,
    EmbeddingStore,
    SimilarityBand,
    band_from_rows,
    build_band,
    cosine,
    load_embeddings,
    write_embeddings,
)
from .errors import (
    AnnotationCoverageError,
    AnnotationError,
    BandRangeError,
    ChiasmosError,
    CorpusFormatError,
    CorpusOrderError,
    DegenerateCohortError,
    EmbeddingFileError,
    UndefinedSimilarityError,
    UnknownBookError,
    WindowBoundsError,
)
from .validation import check_book_spans, check_unit_vectors

__all__ = [
    "__version__",
    "ATNACH", "BOOKS", "BOOK_INDEX",
    "Corpus", "Granularity", "Half", "TextUnit", "VerseRef",
    "parse_corpus", "read_unit_table", "segment_half_verses", "strip_pointing", "write_unit_table",
    "EMBEDDING_FORMAT", "EmbeddingStore", "SimilarityBand",
    "band_from_rows", "build_band", "cosine", "load_embeddings", "write_embeddings",
    "CandidateId", "ChiasmusCandidate", "ChiasmusDetector", "Cohort", "OverlapPolicy",
    "PairScheme", "ScanConfig", "Statistic", "WindowScore",
    "candidate_from_row", "pair_scheme", "read_candidates_jsonl", "scan", "score_window",
    "select", "standardize", "write_candidates_jsonl",
    "AgreementSummary", "AnnotationRecord", "GranularityStats", "Label", "SummaryStats",
    "agreement_summary", "build_report", "cohen_kappa", "precision_at_k",
    "read_annotations", "render_report_text", "summarize",
    "AnnotationCoverageError", "AnnotationError", "BandRangeError", "ChiasmosError",
    "CorpusFormatError", "CorpusOrderError", "DegenerateCohortError", "EmbeddingFileError",
    "UndefinedSimilarityError", "UnknownBookError", "WindowBoundsError",
    "check_book_spans", "check_unit_vectors",
]
