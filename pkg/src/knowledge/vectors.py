"""
Word vectors for the fusion layer

Either loaded from a TSV table (word<TAB>v1<TAB>...<TAB>vd) or drawn per word
from a seeded stream keyed on the word itself, so a word's vector never
depends on which other words are in the vocabulary.
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from src.utils.errors import DatasetParseError
from src.utils.io import PathLike
from src.utils.rng import derive_rng

logger = logging.getLogger(__name__)


class WordVectors:
    """
    Case-insensitive word -> vector lookup

    Words missing from a loaded table fall back to seeded random vectors when
    a seed is set, and to the zero vector otherwise.

    Examples:
        >>> wv = WordVectors.random(dim=8, seed=3)
        >>> wv.embed(['Flagyl', 'flagyl']).shape
        (2, 8)
    """

    def __init__(self, dim: int, table: Optional[Dict[str, np.ndarray]] = None, seed: Optional[int] = None):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.table = {w.lower(): v for w, v in (table or {}).items()}
        self.seed = seed

    @classmethod
    def random(cls, dim: int, seed: int) -> 'WordVectors':
        return cls(dim=dim, seed=seed)

    @classmethod
    def from_tsv(cls, path: PathLike, seed: Optional[int] = None) -> 'WordVectors':
        try:
            df = pd.read_csv(
                path, sep='\t', header=None, comment='#', quoting=3,
                keep_default_na=False, float_precision='round_trip',
            )
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DatasetParseError(f"{path}: malformed word vector table ({e})") from e
        if df.shape[1] < 2:
            raise DatasetParseError(f"{path}: expected word<TAB>v1..vd rows")

        words = df.iloc[:, 0].astype(str)
        values = df.iloc[:, 1:].to_numpy(dtype=float)
        table = {w: values[i] for i, w in enumerate(words)}
        logger.info(f"✅ Loaded {len(table):,} word vectors (dim={values.shape[1]}) from {path}")
        return cls(dim=values.shape[1], table=table, seed=seed)

    def vector(self, word: str) -> np.ndarray:
        key = word.lower()
        if key in self.table:
            return self.table[key]
        if self.seed is None:
            return np.zeros(self.dim)
        return derive_rng(self.seed, 'word', key).normal(0.0, 1.0 / np.sqrt(self.dim), size=self.dim)

    def embed(self, words: Sequence[str]) -> np.ndarray:
        if not words:
            return np.zeros((0, self.dim))
        return np.vstack([self.vector(w) for w in words])
