from __future__ import annotations

import io
import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from chiasmos import (
    ATNACH,
    BOOKS,
    CorpusFormatError,
    CorpusOrderError,
    Granularity,
    Half,
    UnknownBookError,
    VerseRef,
    parse_corpus,
    read_unit_table,
    segment_half_verses,
    strip_pointing,
    write_unit_table,
)

from conftest import ACCENTS, LETTERS, MAQAF, POINTS, SOF_PASUQ

GEN11 = "בְּרֵאשִׁ֖ית בָּרָ֣א אֱלֹהִ֑ים אֵ֥ת הַשָּׁמַ֖יִם וְאֵ֥ת הָאָֽרֶץ׃"
GEN11_STRIPPED = "בראשית ברא אלהים את השמים ואת הארץ"

# Everything strip_pointing removes, as an independent character class.
_STRIPPED_CLASS = re.compile(r"[֑-ְ֯-ֽֿׁ-ׇׅ]")

pointed_text = st.text(
    alphabet=st.sampled_from(LETTERS + POINTS + ACCENTS + [ATNACH, MAQAF, SOF_PASUQ, " "]),
    max_size=60,
)


def rows(*triples):
    return [f"{b}\t{c}\t{v}\t{t}" for b, c, v, t in triples]


class TestStripPointing:
    def test_single_word(self):
        assert strip_pointing("בְּרֵאשִׁ֖ית") == "בראשית"

    def test_identity_on_bare_consonants(self):
        assert strip_pointing("אב") == "אב"

    def test_gen11_token_count(self):
        stripped = strip_pointing(GEN11)
        assert stripped == GEN11_STRIPPED
        assert len(stripped.split()) == 7
        # independent oracle: drop the character class, collapse whitespace
        oracle = " ".join(_STRIPPED_CLASS.sub("", GEN11).split())
        assert stripped == oracle

    def test_whitespace_collapsed(self):
        assert strip_pointing("  אב\t בן \n") == "אב בן"

    def test_maqaf_kept_sof_pasuq_removed(self):
        assert strip_pointing("אב־בן׃") == "אב־בן"

    @settings(max_examples=300, derandomize=True)
    @given(pointed_text)
    def test_idempotent(self, text):
        once = strip_pointing(text)
        assert strip_pointing(once) == once

    @settings(max_examples=300, derandomize=True)
    @given(pointed_text)
    def test_no_stripped_codepoints_survive(self, text):
        assert not _STRIPPED_CLASS.search(strip_pointing(text))


class TestSegmentHalfVerses:
    def test_two_token_split(self):
        verse = "אָ֑ב בן"  # atnach inside the first token
        assert segment_half_verses(verse) == ("אָ֑ב", "בן")

    def test_no_atnach(self):
        assert segment_half_verses("אב בן") == ("אב בן", None)

    def test_gen11_split_point(self):
        first, second = segment_half_verses(GEN11)
        # independent check: the split is right after the token with U+0591
        match = re.search(r"\S*֑\S*", GEN11)
        boundary = match.end()
        assert first == " ".join(GEN11[:boundary].split())
        assert second == " ".join(GEN11[boundary:].split())
        assert first.endswith("אֱלֹהִ֑ים")

    def test_multiple_atnach_splits_at_first(self):
        verse = f"א{ATNACH}ב גד ה{ATNACH}ו זח"
        first, second = segment_half_verses(verse)
        assert first == f"א{ATNACH}ב"
        assert second == f"גד ה{ATNACH}ו זח"

    def test_atnach_on_last_token_gives_empty_second_half(self):
        first, second = segment_half_verses(f"אב ג{ATNACH}ד")
        assert first == f"אב ג{ATNACH}ד"
        assert second == ""

    @settings(max_examples=300, derandomize=True)
    @given(pointed_text)
    def test_letters_preserved(self, text):
        first, second = segment_half_verses(text)
        halves = [strip_pointing(h) for h in (first, second) if h]
        assert " ".join(" ".join(halves).split()) == strip_pointing(text)


class TestParseCorpus:
    def test_minimal_verse_corpus(self):
        corpus = parse_corpus(rows(("Genesis", 1, 1, "אב"), ("Genesis", 1, 2, "גד"), ("Genesis", 1, 3, "הו")), "verse")
        assert len(corpus) == 3
        assert corpus.book_spans == {"Genesis": (0, 2)}
        assert corpus.granularity is Granularity.VERSE
        assert [u.ref.half for u in corpus.units] == [Half.WHOLE] * 3

    def test_atnach_verse_produces_two_halves(self):
        corpus = parse_corpus(rows(("Genesis", 1, 1, f"א{ATNACH}ב גד")), "half")
        assert len(corpus) == 2
        assert [u.ref.half for u in corpus.units] == [Half.FIRST, Half.SECOND]
        assert corpus.units[0].normalized_text == "אב"
        assert corpus.units[1].normalized_text == "גד"

    def test_verse_without_atnach_is_one_first_half(self):
        corpus = parse_corpus(rows(("Genesis", 1, 1, "אב גד")), "half")
        assert len(corpus) == 1
        assert corpus.units[0].ref.half is Half.FIRST

    def test_comments_and_blanks_ignored(self):
        lines = ["# header", "", "Genesis\t1\t1\tאב"]
        assert len(parse_corpus(lines, "verse")) == 1

    def test_malformed_row_names_line(self):
        with pytest.raises(CorpusFormatError, match="line 2"):
            parse_corpus(rows(("Genesis", 1, 1, "אב")) + ["Genesis\t1\t2"], "verse")

    def test_non_integer_chapter(self):
        with pytest.raises(CorpusFormatError, match="line 1"):
            parse_corpus(["Genesis\tone\t1\tאב"], "verse")

    def test_unknown_book(self):
        with pytest.raises(UnknownBookError, match="Genesys"):
            parse_corpus(rows(("Genesys", 1, 1, "אב")), "verse")

    def test_out_of_order_verses(self):
        with pytest.raises(CorpusOrderError, match="line 2"):
            parse_corpus(rows(("Genesis", 1, 2, "אב"), ("Genesis", 1, 1, "גד")), "verse")

    def test_out_of_order_books(self):
        with pytest.raises(CorpusOrderError):
            parse_corpus(rows(("Exodus", 1, 1, "אב"), ("Genesis", 1, 1, "גד")), "verse")

    def test_duplicate_reference_rejected(self):
        with pytest.raises(CorpusOrderError):
            parse_corpus(rows(("Genesis", 1, 1, "אב"), ("Genesis", 1, 1, "גד")), "verse")

    def test_empty_input_rejected(self):
        with pytest.raises(CorpusFormatError):
            parse_corpus(["# nothing"], "verse")

    def test_book_spans_partition_two_books(self):
        corpus = parse_corpus(
            rows(("Genesis", 1, 1, "אב"), ("Genesis", 1, 2, "גד"), ("Exodus", 1, 1, "הו")), "verse"
        )
        assert corpus.book_spans == {"Genesis": (0, 1), "Exodus": (2, 2)}
        assert corpus.ranges() == (("Genesis", 0, 2), ("Exodus", 2, 3))


class TestFixtureCorpus:
    def test_half_count_matches_independent_atnach_tally(self, corpus50_path):
        lines = corpus50_path.read_text(encoding="utf-8").splitlines()
        data = [l for l in lines if l and not l.startswith("#")]
        # independent oracle: scan raw rows for U+0591
        n_verses = len(data)
        n_with_atnach = sum(1 for l in data if ATNACH in l.split("\t")[3])
        assert (n_verses, n_with_atnach) == (50, 35)

        verse_corpus = parse_corpus(data, "verse")
        half_corpus = parse_corpus(data, "half")
        assert len(verse_corpus) == 50
        assert len(half_corpus) == len(verse_corpus) + n_with_atnach == 85

    def test_unit_order_is_monotone(self, corpus50_path):
        corpus = parse_corpus(corpus50_path.read_text(encoding="utf-8").splitlines(), "half")
        keys = [u.ref.sort_key() for u in corpus.units]
        assert keys == sorted(keys)
        assert [u.id for u in corpus.units] == list(range(len(corpus)))


class TestUnitTable:
    def test_round_trip(self, corpus50_path):
        corpus = parse_corpus(corpus50_path.read_text(encoding="utf-8").splitlines(), "half")
        buf = io.StringIO()
        write_unit_table(corpus, buf)
        back = read_unit_table(io.StringIO(buf.getvalue()))
        assert back.granularity is Granularity.HALF
        assert back.book_spans == corpus.book_spans
        assert [u.ref for u in back.units] == [u.ref for u in corpus.units]
        assert [u.normalized_text for u in back.units] == [u.normalized_text for u in corpus.units]

    def test_verse_granularity_inferred(self):
        corpus = parse_corpus(rows(("Genesis", 1, 1, "אב"), ("Genesis", 1, 2, "גד")), "verse")
        buf = io.StringIO()
        write_unit_table(corpus, buf)
        assert read_unit_table(io.StringIO(buf.getvalue())).granularity is Granularity.VERSE

    def test_wrong_column_count(self):
        with pytest.raises(CorpusFormatError, match="line 1"):
            read_unit_table(["0\tGenesis\t1\t1\tW"])

    def test_non_contiguous_ids(self):
        with pytest.raises(CorpusFormatError, match="contiguous"):
            read_unit_table(["0\tGenesis\t1\t1\tW\tאב", "2\tGenesis\t1\t2\tW\tגד"])

    def test_mixed_halves_rejected(self):
        with pytest.raises(CorpusFormatError, match="mixes"):
            read_unit_table(["0\tGenesis\t1\t1\tW\tאב", "1\tGenesis\t1\t2\tA\tגד"])

    def test_bad_half_code(self):
        with pytest.raises(CorpusFormatError, match="W/A/B"):
            read_unit_table(["0\tGenesis\t1\t1\tX\tאב"])


class TestVerseRef:
    def test_label_forms(self):
        assert VerseRef("Genesis", 1, 2).label() == "Genesis 1:2"
        assert VerseRef("1 Samuel", 3, 4, Half.SECOND).label() == "1 Samuel 3:4b"

    @pytest.mark.parametrize("label", ["Genesis 1:2", "1 Samuel 3:4b", "Song of Songs 2:10a"])
    def test_parse_round_trip(self, label):
        assert VerseRef.parse(label).label() == label

    def test_rejects_unknown_book(self):
        with pytest.raises(ValueError):
            VerseRef("Atlantis", 1, 1)

    def test_rejects_nonpositive_numbers(self):
        with pytest.raises(ValueError):
            VerseRef("Genesis", 0, 1)

    def test_book_table_has_39_entries(self):
        assert len(BOOKS) == 39
        assert len(set(BOOKS)) == 39


def test_fuzzed_pipeline_properties():
    """Seeded 1000-string fuzz: idempotence and letter preservation."""
    rng = random.Random(99)
    alphabet = LETTERS + POINTS + ACCENTS + [ATNACH, MAQAF, SOF_PASUQ, " ", " "]
    for _ in range(1000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80)))
        once = strip_pointing(text)
        assert strip_pointing(once) == once
        first, second = segment_half_verses(text)
        halves = [strip_pointing(h) for h in (first, second) if h]
        assert " ".join(" ".join(halves).split()) == once
