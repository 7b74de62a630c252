"""
Seeded subsampling of QA pairs

sample_questions draws the same fraction of questions inside every note,
each note with its own random stream derived from (seed, note_id), so the
sample of one note never depends on the contents of another.
"""

import logging
import math
from typing import Dict, Sequence

from src.utils.rng import derive_rng

from .model import Dataset

logger = logging.getLogger(__name__)


def per_note_count(rate: float, n_qa: int) -> int:
    """round-half-up(rate * n_qa)"""
    return math.floor(rate * n_qa + 0.5 + 1e-9)


def sample_questions(dataset: Dataset, rate: float, seed: int) -> Dataset:
    """
    Keep round(rate * n) QA pairs of every note, uniformly without replacement

    Notes are retained even when none of their QA pairs survive; kept QA
    pairs appear in their original order.

    Args:
        dataset: Corpus to sample
        rate: Fraction in (0, 1]
        seed: Base seed

    Returns:
        Sampled Dataset (a subset of the input)

    Example:
        >>> sample_questions(ds, rate=0.2, seed=3).n_questions
    """
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")

    logger.info(f"🎲 Sampling {rate:.0%} of QA pairs per note (seed={seed})")

    by_note = dataset.qa_by_note()
    keep = set()
    for note_id, qa_pairs in by_note.items():
        k = min(per_note_count(rate, len(qa_pairs)), len(qa_pairs))
        if k == len(qa_pairs):
            chosen = range(len(qa_pairs))
        else:
            chosen = derive_rng(seed, note_id).choice(len(qa_pairs), size=k, replace=False)
        keep.update(qa_pairs[int(i)].question_id for i in chosen)

    sampled = tuple(qa for qa in dataset.qa_pairs if qa.question_id in keep)
    logger.info(f"   kept {len(sampled):,}/{dataset.n_questions:,} questions")
    return Dataset(notes=dataset.notes, qa_pairs=sampled)


def sample_rate_grid(dataset: Dataset, rates: Sequence[float], seed: int) -> Dict[float, Dataset]:
    """
    One per-note sample for each rate of a redundancy grid, all with the same seed

    Example:
        >>> from src.utils.config import SAMPLE_RATE_GRIDS
        >>> grid = sample_rate_grid(ds, SAMPLE_RATE_GRIDS['medication'], seed=3)
        >>> {rate: s.n_questions for rate, s in grid.items()}
    """
    if not rates:
        raise ValueError("rate grid is empty")

    grid = {float(rate): sample_questions(dataset, rate, seed) for rate in rates}
    summary = ', '.join(f"{rate:.0%}: {s.n_questions:,}" for rate, s in grid.items())
    logger.info(f"📊 Rate grid (seed={seed}): {summary}")
    return grid


def sample_distinct_answers(dataset: Dataset, n: int, seed: int) -> Dataset:
    """
    Draw up to n QA pairs such that no two share a normalized answer text

    Used to build annotation-study samples. Only notes referenced by the
    sample are kept.
    """
    from src.evaluation.metrics import normalize_answer

    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")

    order = derive_rng(seed, 'distinct-answers').permutation(dataset.n_questions)
    taken_answers = set()
    chosen = set()
    for idx in order:
        if len(chosen) >= n:
            break
        qa = dataset.qa_pairs[int(idx)]
        answers = {normalize_answer(t) for t in qa.answer_texts}
        if answers & taken_answers:
            continue
        taken_answers |= answers
        chosen.add(qa.question_id)

    if len(chosen) < n:
        logger.warning(f"⚠️ Only {len(chosen)} QA pairs with distinct answers (asked for {n})")

    qa_pairs = tuple(qa for qa in dataset.qa_pairs if qa.question_id in chosen)
    used_notes = {qa.note_id for qa in qa_pairs}
    return Dataset(
        notes=tuple(note for note in dataset.notes if note.note_id in used_notes),
        qa_pairs=qa_pairs,
    )
