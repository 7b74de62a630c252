"""
Document-level train/dev/test splitting

QA pairs always travel with their note, so no context is shared between
splits.
"""

import logging
import math
from typing import Dict, Sequence, Tuple

import numpy as np
import pandas as pd

from src.utils.errors import ToolkitError

from .io import subset_dataset
from .model import Dataset

logger = logging.getLogger(__name__)

SPLIT_NAMES = ('train', 'dev', 'test')


def split_counts(n_notes: int, ratios: Sequence[float]) -> Tuple[int, int, int]:
    """
    Number of notes per split: floor for train and dev, remainder for test

    Example:
        >>> split_counts(261, (0.7, 0.1, 0.2))
        (182, 26, 53)
    """
    n_train = math.floor(ratios[0] * n_notes + 1e-9)
    n_dev = math.floor(ratios[1] * n_notes + 1e-9)
    return n_train, n_dev, n_notes - n_train - n_dev


def _check_ratios(ratios: Sequence[float]) -> None:
    if len(ratios) != 3:
        raise ValueError(f"Expected three ratios, got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise ValueError(f"Ratios must be positive: {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"Ratios must sum to 1: {tuple(ratios)} sums to {sum(ratios)}")


def split_by_documents(
    dataset: Dataset,
    ratios: Sequence[float],
    seed: int,
) -> Tuple[Dataset, Dataset, Dataset]:
    """
    Shuffle notes with `seed` and cut them into train/dev/test

    Within each split, notes and QA pairs keep their input order.

    Args:
        dataset: Corpus to split
        ratios: (train, dev, test) proportions, positive, summing to 1
        seed: Shuffle seed

    Returns:
        (train, dev, test) datasets

    Example:
        >>> train, dev, test = split_by_documents(ds, (0.7, 0.1, 0.2), seed=1)
    """
    _check_ratios(ratios)
    n_notes = dataset.n_contexts
    if n_notes < 3:
        raise ToolkitError(f"Need at least 3 notes to split, got {n_notes}")

    order = np.random.default_rng(seed).permutation(n_notes)
    n_train, n_dev, _ = split_counts(n_notes, ratios)

    position = {int(idx): rank for rank, idx in enumerate(order)}
    buckets = ([], [], [])
    for idx, note in enumerate(dataset.notes):
        rank = position[idx]
        bucket = 0 if rank < n_train else 1 if rank < n_train + n_dev else 2
        buckets[bucket].append(note.note_id)

    splits = tuple(subset_dataset(dataset, ids) for ids in buckets)
    for name, split in zip(SPLIT_NAMES, splits):
        logger.info(f"   {name}: {split.n_questions:,} questions / {split.n_contexts:,} contexts")
    return splits


def split_stats(splits: Dict[str, Dataset]) -> pd.DataFrame:
    """
    Questions/contexts per split with a Total row

    Returns:
        DataFrame with columns split, n_questions, n_contexts
    """
    rows = [
        {'split': name, 'n_questions': ds.n_questions, 'n_contexts': ds.n_contexts}
        for name, ds in splits.items()
    ]
    df = pd.DataFrame(rows, columns=['split', 'n_questions', 'n_contexts'])
    total = {'split': 'total', 'n_questions': int(df['n_questions'].sum()), 'n_contexts': int(df['n_contexts'].sum())}
    return pd.concat([df, pd.DataFrame([total])], ignore_index=True)
