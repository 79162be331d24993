"""Sentence-encoder wrapper producing unit-norm vectors per text unit.

Every unit gets the same symmetric-similarity task prefix ("query: ") so
pairwise cosines stay comparable; the prefix choice is recorded in the
emitted model_id. Inference runs single-threaded for reproducibility.
"""

from __future__ import annotations

import logging
from typing import Sequence, TextIO

import numpy as np
from sentence_transformers import SentenceTransformer

from .unitfile import read_units
from .writer import write_embedding_file

logger = logging.getLogger(__name__)

DEFAULT_MODEL = "intfloat/multilingual-e5-small"
TASK_PREFIX = "query: "


def _model_revision(name: str) -> str:
    """Best-effort commit hash of the locally cached model snapshot."""
    try:
        from huggingface_hub import snapshot_download

        path = snapshot_download(name, local_files_only=True)
        parts = path.split("/snapshots/")
        if len(parts) == 2:
            return parts[1].split("/")[0]
    except Exception:
        pass
    return "unknown"


class UnitEncoder:
    """Batched encoder for unit texts."""

    def __init__(self, model_name: str = DEFAULT_MODEL):
        self.model_name = model_name
        self.model = SentenceTransformer(model_name)
        self.dim = int(self.model.get_sentence_embedding_dimension())
        self.model_id = f"{model_name}@{_model_revision(model_name)}|prefix={TASK_PREFIX.strip()}"

    def encode(self, texts: Sequence[str], batch_size: int = 64) -> np.ndarray:
        try:
            import torch

            torch.set_num_threads(1)
        except ImportError:
            pass
        empties = sum(1 for t in texts if not t.strip())
        if empties:
            logger.warning("%d unit(s) have empty normalized text; embedding the empty string", empties)
        prefixed = [TASK_PREFIX + t for t in texts]
        vectors = self.model.encode(
            prefixed,
            batch_size=batch_size,
            normalize_embeddings=True,
            convert_to_numpy=True,
            show_progress_bar=False,
        )
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape != (len(texts), self.dim):
            raise RuntimeError(f"encoder returned shape {vectors.shape}, expected ({len(texts)}, {self.dim})")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0):
            raise RuntimeError("encoder produced a zero vector")
        return vectors / norms[:, None]


def embed_units(units_path: str, out: TextIO, model_name: str = DEFAULT_MODEL, batch_size: int = 64) -> int:
    """Encode a unit table and write the embedding file; returns the count."""
    texts = read_units(units_path)
    encoder = UnitEncoder(model_name)
    vectors = encoder.encode(texts, batch_size=batch_size)
    write_embedding_file(out, vectors, encoder.model_id)
    return len(texts)
