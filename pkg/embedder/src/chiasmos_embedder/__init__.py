"""Embedding file generation for chiasmos unit tables."""

__version__ = "0.1.0"

from .encode import DEFAULT_MODEL, UnitEncoder, embed_units
from .unitfile import read_units
from .writer import write_embedding_file

__all__ = ["DEFAULT_MODEL", "UnitEncoder", "embed_units", "read_units", "write_embedding_file", "__version__"]
