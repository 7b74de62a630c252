"""
Tests for per-note question sampling
"""

from decimal import ROUND_HALF_UP, Decimal

import numpy as np
import pytest

from src.corpus import sample_distinct_answers, sample_questions, sample_rate_grid
from src.corpus.sampling import per_note_count
from src.evaluation.metrics import normalize_answer
from src.utils.config import SAMPLE_RATE_GRIDS

from conftest import make_corpus

RATES = (0.05, 0.2, 1.0)
SEEDS = (0, 1, 2)


def _half_up(rate: float, n: int) -> int:
    return int((Decimal(str(rate)) * n).quantize(Decimal('1'), rounding=ROUND_HALF_UP))


@pytest.fixture(scope='module')
def big_corpus():
    """1,000 notes with 0-40 QA pairs each"""
    counts = np.random.default_rng(2024).integers(0, 41, size=1000)
    return make_corpus(1000, lambda i: int(counts[i]))


@pytest.mark.parametrize('rate', RATES)
@pytest.mark.parametrize('seed', SEEDS)
def test_per_note_counts_round_half_up(big_corpus, rate, seed):
    sampled = sample_questions(big_corpus, rate, seed)
    before = big_corpus.qa_by_note()
    after = sampled.qa_by_note()

    for note_id, qa_pairs in before.items():
        assert len(after[note_id]) == _half_up(rate, len(qa_pairs))


@pytest.mark.parametrize('seed', SEEDS)
def test_sample_is_an_ordered_subset(big_corpus, seed):
    sampled = sample_questions(big_corpus, 0.2, seed)
    original = [qa.question_id for qa in big_corpus.qa_pairs]
    kept = [qa.question_id for qa in sampled.qa_pairs]

    assert set(kept) <= set(original)
    assert kept == [qid for qid in original if qid in set(kept)]
    assert sampled.notes == big_corpus.notes


def test_rate_one_is_identity(big_corpus):
    assert sample_questions(big_corpus, 1.0, seed=9) == big_corpus


def test_sampling_is_deterministic(big_corpus):
    first = sample_questions(big_corpus, 0.05, seed=4)
    assert first == sample_questions(big_corpus, 0.05, seed=4)
    assert first != sample_questions(big_corpus, 0.05, seed=5)


def test_half_counts_round_up():
    assert per_note_count(0.05, 10) == 1     # 0.5 -> 1
    assert per_note_count(0.05, 9) == 0      # 0.45 -> 0
    assert per_note_count(0.2, 12) == 2      # 2.4 -> 2
    assert per_note_count(0.1, 25) == 3      # 2.5 -> 3


@pytest.mark.parametrize('rate', [0.0, -0.1, 1.5])
def test_rate_out_of_range(big_corpus, rate):
    with pytest.raises(ValueError):
        sample_questions(big_corpus, rate, seed=0)


# ============================================================================
# DISTINCT-ANSWER SAMPLES
# ============================================================================

def test_distinct_answers_never_repeat(corpus):
    sample = sample_distinct_answers(corpus, n=20, seed=3)
    seen = set()
    for qa in sample.qa_pairs:
        answers = {normalize_answer(t) for t in qa.answer_texts}
        assert not answers & seen
        seen |= answers

    # q07 and q09 share their answer line, as do q10 and q12
    assert sample.n_questions == 10
    assert {n.note_id for n in sample.notes} == {qa.note_id for qa in sample.qa_pairs}


def test_distinct_answers_respects_n(corpus):
    sample = sample_distinct_answers(corpus, n=4, seed=3)
    assert sample.n_questions == 4
    assert sample == sample_distinct_answers(corpus, n=4, seed=3)


@pytest.mark.parametrize('grid', ['medication', 'relation'])
def test_rate_grid(big_corpus, grid):
    rates = SAMPLE_RATE_GRIDS[grid]
    samples = sample_rate_grid(big_corpus, rates, seed=1)

    assert list(samples) == list(rates)
    for rate, sampled in samples.items():
        assert sampled == sample_questions(big_corpus, rate, seed=1)


def test_empty_rate_grid(big_corpus):
    with pytest.raises(ValueError):
        sample_rate_grid(big_corpus, [], seed=1)
