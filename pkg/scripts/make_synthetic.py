#!/usr/bin/env python3
"""Generate a synthetic corpus plus embeddings for a demo pipeline run.

Writes corpus.tsv (pointed text), units.tsv (prepared at the chosen
granularity), units.emb (random unit vectors with planted chiastic
windows), and translations.tsv (placeholder glosses for the review UI),
then prints the commands to run next.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

import numpy as np

from chiasmos import parse_corpus, write_embeddings, write_unit_table

LETTERS = [chr(c) for c in range(0x05D0, 0x05EB)]
POINTS = [chr(c) for c in range(0x05B0, 0x05BE)]
ACCENTS = [chr(c) for c in range(0x0592, 0x05B0)]
ATNACH = "֑"


def pointed_verse(rng: random.Random, with_atnach: bool) -> str:
    words = []
    n_words = rng.randint(4, 9)
    atnach_at = rng.randrange(max(1, n_words - 1)) if with_atnach else -1
    for i in range(n_words):
        letters = []
        for j in range(rng.randint(2, 6)):
            letters.append(rng.choice(LETTERS))
            if rng.random() < 0.8:
                letters.append(rng.choice(POINTS))
            if i == atnach_at and j == 1:
                letters.append(ATNACH)
            elif rng.random() < 0.25:
                letters.append(rng.choice(ACCENTS))
        words.append("".join(letters))
    return " ".join(words)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("demo"))
    parser.add_argument("--verses", type=int, default=120)
    parser.add_argument("--granularity", choices=["verse", "half"], default="half")
    parser.add_argument("--plant", type=int, default=3, help="number of planted chiastic windows")
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)

    books = ["Genesis", "Exodus"]
    per_book = args.verses // len(books)
    rows = []
    for book in books:
        for v in range(1, per_book + 1):
            rows.append(f"{book}\t1\t{v}\t{pointed_verse(rng, rng.random() < 0.7)}")
    (out / "corpus.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    corpus = parse_corpus(rows, args.granularity)
    with open(out / "units.tsv", "w", encoding="utf-8") as handle:
        write_unit_table(corpus, handle)

    np_rng = np.random.default_rng(args.seed)
    X = np_rng.normal(size=(len(corpus), args.dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    planted = []
    spans = list(corpus.ranges())
    for i in range(args.plant):
        book, start, stop = spans[i % len(spans)]
        n = int(np_rng.integers(4, 9))
        anchor = int(np_rng.integers(start, stop - n + 1))
        for j in range(n // 2):
            X[anchor + n - 1 - j] = X[anchor + j]
        planted.append((book, anchor, n))
    with open(out / "units.emb", "w", encoding="utf-8") as handle:
        write_embeddings(handle, X, model_id=f"synthetic-demo-seed{args.seed}")

    with open(out / "translations.tsv", "w", encoding="utf-8") as handle:
        for unit in corpus.units:
            handle.write(f"{unit.id}\tgloss for {unit.ref.label()}\n")

    print(f"{len(corpus)} units at {args.granularity} granularity in {out}/")
    for book, anchor, n in planted:
        print(f"  planted: {book} units {anchor}..{anchor + n - 1} (length {n})")
    print("next:")
    print(f"  chiasmos detect {out}/units.tsv {out}/units.emb --out {out}/candidates.jsonl \\")
    print(f"      --translations {out}/translations.tsv")
    print(f"  chiasmos report {out}/candidates.jsonl --out {out}/report.json")
    print(f"  chiasmos serve {out}/candidates.jsonl --annotations {out}/labels.jsonl --bind 127.0.0.1:8080")


if __name__ == "__main__":
    main()
