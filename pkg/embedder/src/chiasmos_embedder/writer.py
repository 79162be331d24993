"""chiasmos-emb-v1 writer.

One JSON header line declaring format, dim, model_id and count, then one
record per unit. Floats go through json's shortest round-trip encoding,
which always carries at least full float precision.
"""

from __future__ import annotations

import json
from typing import TextIO

import numpy as np

FORMAT = "chiasmos-emb-v1"


def write_embedding_file(out: TextIO, vectors: np.ndarray, model_id: str) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError(f"expected a (count, dim) matrix, got shape {vectors.shape}")
    header = {
        "format": FORMAT,
        "dim": int(vectors.shape[1]),
        "model_id": model_id,
        "count": int(vectors.shape[0]),
    }
    out.write(json.dumps(header) + "\n")
    for unit_id, row in enumerate(vectors):
        out.write(json.dumps({"unit_id": unit_id, "v": row.tolist()}) + "\n")
