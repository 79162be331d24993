"""Input validation helpers for the array-level detector API."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

Ranges = tuple[tuple[str, int, int], ...]


def check_unit_vectors(X, *, tol: float = 1e-4) -> np.ndarray:
    """Coerce X to a float64 matrix of unit-norm rows, or raise ValueError."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of unit vectors, got {X.ndim}-D")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"empty embedding matrix of shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("embedding matrix contains non-finite components")
    norms = np.linalg.norm(X, axis=1)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > tol:
        raise ValueError(f"rows must be unit-norm within {tol}; worst |norm-1| is {worst:.3g}")
    return X


def check_book_spans(book_spans, n_units: int) -> Ranges:
    """Normalize book spans to ((name, start, stop), ...) with stop exclusive.

    Accepts None (one span covering everything), a mapping of name to
    inclusive (first_id, last_id), or a sequence of inclusive pairs which
    get generated names. Spans must partition [0, n_units) in order.
    """
    if n_units < 1:
        raise ValueError("n_units must be >= 1")
    if book_spans is None:
        return (("all", 0, n_units),)
    if isinstance(book_spans, Mapping):
        items = [(str(name), pair) for name, pair in book_spans.items()]
    elif isinstance(book_spans, Sequence):
        items = [(f"segment_{i}", pair) for i, pair in enumerate(book_spans)]
    else:
        raise ValueError(f"book_spans must be None, a mapping, or a sequence, got {type(book_spans).__name__}")

    ranges: list[tuple[str, int, int]] = []
    expected_start = 0
    for name, pair in items:
        try:
            first, last = (int(pair[0]), int(pair[1]))
        except (TypeError, ValueError, IndexError):
            raise ValueError(f"span {name!r} must be an inclusive (first_id, last_id) pair") from None
        if first != expected_start:
            raise ValueError(f"span {name!r} starts at {first}, expected {expected_start}: spans must partition the corpus")
        if last < first:
            raise ValueError(f"span {name!r} has last_id {last} < first_id {first}")
        ranges.append((name, first, last + 1))
        expected_start = last + 1
    if expected_start != n_units:
        raise ValueError(f"spans cover [0, {expected_start}) but the corpus has {n_units} units")
    return tuple(ranges)
