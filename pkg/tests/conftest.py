from __future__ import annotations

import io
import random
from pathlib import Path

import numpy as np
import pytest

from chiasmos import EmbeddingStore, write_embeddings

DATA = Path(__file__).parent / "data"

# Character pools for synthetic pointed Hebrew.
LETTERS = [chr(c) for c in range(0x05D0, 0x05EB)]
POINTS = [chr(c) for c in range(0x05B0, 0x05BE)]
ACCENTS = [chr(c) for c in range(0x0592, 0x05B0)]  # cantillation minus atnach
ATNACH = "֑"
SOF_PASUQ = "׃"
MAQAF = "־"


@pytest.fixture
def corpus50_path() -> Path:
    return DATA / "corpus50.tsv"


def unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    X = rng.normal(size=(n, dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X


def make_store(vectors, model_id: str = "test-model") -> EmbeddingStore:
    vectors = np.asarray(vectors, dtype=np.float64)
    return EmbeddingStore(dim=vectors.shape[1], model_id=model_id, vectors=vectors)


def emb_text(vectors, model_id: str = "test-model") -> str:
    buf = io.StringIO()
    write_embeddings(buf, vectors, model_id)
    return buf.getvalue()


def plant_chiasm(X: np.ndarray, start: int, n: int) -> None:
    """Overwrite the mirror half of a window so matched pairs are identical."""
    for i in range(n // 2):
        X[start + n - 1 - i] = X[start + i]


def pointed_word(rng: random.Random, accent: str | None = None) -> str:
    out = []
    size = rng.randint(2, 6)
    for i in range(size):
        out.append(rng.choice(LETTERS))
        if rng.random() < 0.8:
            out.append(rng.choice(POINTS))
        if accent is not None and i == size // 2:
            out.append(accent)
        elif rng.random() < 0.3:
            out.append(rng.choice(ACCENTS))
    return "".join(out)


def pointed_verse(rng: random.Random, with_atnach: bool) -> str:
    n_words = rng.randint(4, 9)
    atnach_at = rng.randrange(max(1, n_words - 1)) if with_atnach else -1
    words = []
    for i in range(n_words):
        word = pointed_word(rng, ATNACH if i == atnach_at else None)
        if rng.random() < 0.1 and i < n_words - 1:
            word += MAQAF + pointed_word(rng)
        words.append(word)
    text = " ".join(words)
    if rng.random() < 0.6:
        text += SOF_PASUQ
    return text


def corpus_tsv(n_verses: int, seed: int = 7, books: tuple[str, ...] = ("Genesis",), atnach_rate: float = 0.7) -> str:
    """Synthetic pointed corpus TSV spread evenly across the given books."""
    rng = random.Random(seed)
    per_book = n_verses // len(books)
    lines = []
    for b, book in enumerate(books):
        count = per_book if b < len(books) - 1 else n_verses - per_book * (len(books) - 1)
        for v in range(1, count + 1):
            text = pointed_verse(rng, rng.random() < atnach_rate)
            lines.append(f"{book}\t1\t{v}\t{text}")
    return "\n".join(lines) + "\n"
