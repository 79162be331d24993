"""Reader for the unit-table TSV this tool consumes.

Rows are ``unit_id<TAB>book<TAB>chapter<TAB>verse<TAB>half<TAB>text`` with
contiguous unit ids from 0. Only ids and texts matter for embedding; the
reference columns pass through unexamined.
"""

from __future__ import annotations


def read_units(path: str) -> list[str]:
    """Return normalized unit texts indexed by unit id."""
    texts: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 6:
                raise ValueError(f"{path}: line {line_no}: expected 6 tab-separated fields, got {len(fields)}")
            try:
                unit_id = int(fields[0])
            except ValueError:
                raise ValueError(f"{path}: line {line_no}: unit_id must be an integer") from None
            if unit_id != len(texts):
                raise ValueError(f"{path}: line {line_no}: unit ids must be contiguous from 0, expected {len(texts)}")
            texts.append(fields[5])
    if not texts:
        raise ValueError(f"{path}: no unit rows found")
    return texts
