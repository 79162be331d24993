"""Versified Hebrew corpus parsing, normalization, and unit segmentation.

The corpus input is a UTF-8 TSV with one pointed verse per row
(``book<TAB>chapter<TAB>verse<TAB>text``, ``#`` lines ignored). Rows are
parsed into an ordered sequence of text units at verse or half-verse
granularity. Half-verse segmentation happens before any normalization,
since it needs the atnach cantillation mark that normalization removes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, TextIO

from .errors import CorpusFormatError, CorpusOrderError, UnknownBookError

ATNACH = "֑"  # HEBREW ACCENT ETNAHTA, the half-verse divider

# Canonical 39-book table in the Hebrew (Leningrad Codex) ordering:
# Torah, Former and Latter Prophets, then the Writings with Chronicles
# leading. Input corpora must use these names, in this order.
BOOKS: tuple[str, ...] = (
    "Genesis", "Exodus", "Leviticus", "Numbers", "Deuteronomy",
    "Joshua", "Judges", "1 Samuel", "2 Samuel", "1 Kings", "2 Kings",
    "Isaiah", "Jeremiah", "Ezekiel",
    "Hosea", "Joel", "Amos", "Obadiah", "Jonah", "Micah", "Nahum",
    "Habakkuk", "Zephaniah", "Haggai", "Zechariah", "Malachi",
    "1 Chronicles", "2 Chronicles", "Psalms", "Job", "Proverbs",
    "Ruth", "Song of Songs", "Ecclesiastes", "Lamentations",
    "Esther", "Daniel", "Ezra", "Nehemiah",
)

BOOK_INDEX: dict[str, int] = {name: i for i, name in enumerate(BOOKS)}

# Code points removed by strip_pointing: cantillation accents, vowel
# points and meteg, rafe, shin/sin dots, sof pasuq, upper/lower dots and
# qamats qatan. Maqaf (U+05BE) and paseq (U+05C0) are word-level
# punctuation and survive.
_STRIP_RANGES = (
    (0x0591, 0x05AF),
    (0x05B0, 0x05BD),
    (0x05BF, 0x05BF),
    (0x05C1, 0x05C2),
    (0x05C3, 0x05C3),
    (0x05C4, 0x05C5),
    (0x05C7, 0x05C7),
)

_STRIP_TABLE = {cp: None for lo, hi in _STRIP_RANGES for cp in range(lo, hi + 1)}


class Half(str, Enum):
    """Which part of a verse a unit covers (W = whole, A/B = halves)."""

    WHOLE = "W"
    FIRST = "A"
    SECOND = "B"


class Granularity(str, Enum):
    VERSE = "verse"
    HALF = "half"


_HALF_RANK = {Half.WHOLE: 0, Half.FIRST: 0, Half.SECOND: 1}
_HALF_SUFFIX = {Half.WHOLE: "", Half.FIRST: "a", Half.SECOND: "b"}


@dataclass(frozen=True)
class VerseRef:
    """Canonical reference to a verse or half-verse."""

    book: str
    chapter: int
    verse: int
    half: Half = Half.WHOLE

    def __post_init__(self):
        if self.book not in BOOK_INDEX:
            raise ValueError(f"unknown book name {self.book!r}")
        if self.chapter < 1 or self.verse < 1:
            raise ValueError("chapter and verse must be >= 1")

    def sort_key(self) -> tuple[int, int, int, int]:
        return (BOOK_INDEX[self.book], self.chapter, self.verse, _HALF_RANK[self.half])

    def label(self) -> str:
        """Readable form, e.g. ``Genesis 1:2`` or ``1 Samuel 3:4b``."""
        return f"{self.book} {self.chapter}:{self.verse}{_HALF_SUFFIX[self.half]}"

    @classmethod
    def parse(cls, text: str) -> "VerseRef":
        book, _, chapter_verse = text.rpartition(" ")
        if not book or ":" not in chapter_verse:
            raise ValueError(f"unparseable verse reference {text!r}")
        chapter_s, _, verse_s = chapter_verse.partition(":")
        half = Half.WHOLE
        if verse_s.endswith("a"):
            half, verse_s = Half.FIRST, verse_s[:-1]
        elif verse_s.endswith("b"):
            half, verse_s = Half.SECOND, verse_s[:-1]
        try:
            return cls(book, int(chapter_s), int(verse_s), half)
        except ValueError as exc:
            raise ValueError(f"unparseable verse reference {text!r}: {exc}") from None


@dataclass(frozen=True)
class TextUnit:
    """One verse or half-verse with raw (pointed) and normalized text."""

    id: int
    ref: VerseRef
    raw_text: str
    normalized_text: str


@dataclass(frozen=True)
class Corpus:
    """Ordered text units partitioned into contiguous book spans."""

    units: tuple[TextUnit, ...]
    book_spans: dict[str, tuple[int, int]]  # book -> (first_id, last_id), inclusive
    granularity: Granularity

    def __len__(self) -> int:
        return len(self.units)

    def ranges(self) -> tuple[tuple[str, int, int], ...]:
        """Book spans as (name, start, stop) with stop exclusive."""
        return tuple((book, first, last + 1) for book, (first, last) in self.book_spans.items())


def strip_pointing(text: str) -> str:
    """Remove vowel points and cantillation marks, collapse whitespace.

    Letters and maqaf are kept; the result is idempotent under repeated
    application.
    """
    return " ".join(text.translate(_STRIP_TABLE).split())


def segment_half_verses(verse_text: str) -> tuple[str, str | None]:
    """Split a pointed verse at the first token carrying an atnach.

    Returns (first_half, second_half). The token bearing the atnach ends
    the first half. Without an atnach the whole verse is returned as the
    first element and the second is None. Tokens are whitespace-delimited;
    halves are rejoined with single spaces.
    """
    tokens = verse_text.split()
    for idx, token in enumerate(tokens):
        if ATNACH in token:
            return " ".join(tokens[: idx + 1]), " ".join(tokens[idx + 1 :])
    return " ".join(tokens), None


def parse_corpus(source: Iterable[str], granularity: Granularity | str) -> Corpus:
    """Parse corpus TSV rows into an ordered, validated Corpus.

    Rows must be in canonical order. Raises CorpusFormatError,
    UnknownBookError or CorpusOrderError with the offending line number.
    """
    granularity = Granularity(granularity)
    units: list[TextUnit] = []
    book_spans: dict[str, tuple[int, int]] = {}
    last_key: tuple[int, int, int] | None = None

    def emit(ref: VerseRef, raw: str) -> None:
        unit = TextUnit(len(units), ref, raw, strip_pointing(raw))
        units.append(unit)
        first, _ = book_spans.get(ref.book, (unit.id, unit.id))
        book_spans[ref.book] = (first, unit.id)

    for line_no, raw_line in enumerate(source, start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorpusFormatError(line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        book, chapter_s, verse_s, text = fields
        if book not in BOOK_INDEX:
            raise UnknownBookError(line_no, book)
        try:
            chapter, verse = int(chapter_s), int(verse_s)
        except ValueError:
            raise CorpusFormatError(line_no, f"chapter/verse must be integers, got {chapter_s!r}:{verse_s!r}") from None
        if chapter < 1 or verse < 1:
            raise CorpusFormatError(line_no, "chapter and verse must be >= 1")
        key = (BOOK_INDEX[book], chapter, verse)
        if last_key is not None and key <= last_key:
            raise CorpusOrderError(line_no, f"{book} {chapter}:{verse} is out of canonical order")
        last_key = key

        if granularity is Granularity.VERSE:
            emit(VerseRef(book, chapter, verse, Half.WHOLE), text)
        else:
            first, second = segment_half_verses(text)
            emit(VerseRef(book, chapter, verse, Half.FIRST), first)
            if second is not None:
                emit(VerseRef(book, chapter, verse, Half.SECOND), second)

    if not units:
        raise CorpusFormatError(0, "corpus contains no data rows")
    return Corpus(tuple(units), book_spans, granularity)


def write_unit_table(corpus: Corpus, out: TextIO) -> None:
    """Write the normalized unit table (TSV, one unit per row)."""
    for unit in corpus.units:
        ref = unit.ref
        out.write(
            f"{unit.id}\t{ref.book}\t{ref.chapter}\t{ref.verse}\t{ref.half.value}\t{unit.normalized_text}\n"
        )


def read_unit_table(source: Iterable[str]) -> Corpus:
    """Read a unit table back into a Corpus.

    The table is already normalized, so raw_text equals normalized_text.
    Granularity is inferred: W rows make a verse corpus, A/B rows a
    half-verse corpus; mixing the two is an error.
    """
    units: list[TextUnit] = []
    book_spans: dict[str, tuple[int, int]] = {}
    halves_seen: set[Half] = set()
    last_key: tuple[int, int, int, int] | None = None

    for line_no, raw_line in enumerate(source, start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise CorpusFormatError(line_no, f"expected 6 tab-separated fields, got {len(fields)}")
        unit_id_s, book, chapter_s, verse_s, half_s, text = fields
        if book not in BOOK_INDEX:
            raise UnknownBookError(line_no, book)
        try:
            unit_id, chapter, verse = int(unit_id_s), int(chapter_s), int(verse_s)
        except ValueError:
            raise CorpusFormatError(line_no, "unit_id/chapter/verse must be integers") from None
        try:
            half = Half(half_s)
        except ValueError:
            raise CorpusFormatError(line_no, f"half must be one of W/A/B, got {half_s!r}") from None
        if unit_id != len(units):
            raise CorpusFormatError(line_no, f"unit ids must be contiguous from 0, expected {len(units)}, got {unit_id}")
        key = (BOOK_INDEX[book], chapter, verse, _HALF_RANK[half])
        if last_key is not None and key <= last_key:
            raise CorpusOrderError(line_no, f"{book} {chapter}:{verse}/{half.value} is out of canonical order")
        last_key = key
        halves_seen.add(half)

        ref = VerseRef(book, chapter, verse, half)
        unit = TextUnit(unit_id, ref, text, text)
        units.append(unit)
        first, _ = book_spans.get(book, (unit_id, unit_id))
        book_spans[book] = (first, unit_id)

    if not units:
        raise CorpusFormatError(0, "unit table contains no data rows")
    if Half.WHOLE in halves_seen and len(halves_seen) > 1:
        raise CorpusFormatError(0, "unit table mixes whole-verse and half-verse rows")
    granularity = Granularity.VERSE if halves_seen == {Half.WHOLE} else Granularity.HALF
    return Corpus(tuple(units), book_spans, granularity)


def iter_verses(corpus: Corpus) -> Iterator[tuple[str, int, int]]:
    """Distinct (book, chapter, verse) triples in corpus order."""
    seen_last: tuple[str, int, int] | None = None
    for unit in corpus.units:
        key = (unit.ref.book, unit.ref.chapter, unit.ref.verse)
        if key != seen_last:
            seen_last = key
            yield key
