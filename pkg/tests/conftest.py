"""
Shared pytest fixtures
Paths to the shipped fixtures plus small programmatic corpora
"""

import pytest

from src.augmentation import build_lexicon, load_knowledge_base, load_lexicon
from src.corpus import AnswerSpan, ClinicalNote, Dataset, QAPair, load_dataset
from src.utils.config import FIXTURES_DIR


@pytest.fixture(scope='session')
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def corpus():
    """3 notes, 12 hand-built QA pairs (q01..q12)"""
    return load_dataset(FIXTURES_DIR / 'corpus.json')


@pytest.fixture
def kb():
    return load_knowledge_base(FIXTURES_DIR / 'kb_entities.json', FIXTURES_DIR / 'kb_triples.tsv')


@pytest.fixture
def lexicon():
    return load_lexicon(FIXTURES_DIR / 'lexicon.tsv')


@pytest.fixture
def kb_lexicon(kb):
    return build_lexicon(kb)


def make_corpus(n_notes: int, qa_per_note, lines_per_note: int = 4) -> Dataset:
    """
    Synthetic corpus: note i has `lines_per_note` lines and qa_per_note(i)
    questions, each answered by one of its lines
    """
    notes, qa_pairs = [], []
    for i in range(n_notes):
        lines = [f"note {i} line {j} text" for j in range(lines_per_note)]
        note = ClinicalNote(f"n{i:04d}", '\n'.join(lines))
        notes.append(note)
        count = qa_per_note(i) if callable(qa_per_note) else qa_per_note
        for k in range(count):
            j = k % lines_per_note
            qa_pairs.append(QAPair(
                question_id=f"n{i:04d}-q{k:03d}",
                question=f"question {k} about note {i}?",
                note_id=note.note_id,
                answers=(AnswerSpan(note.line_text(j), note.lines[j][0]),),
                template_id=f"t{k % 3}",
            ))
    return Dataset(notes=tuple(notes), qa_pairs=tuple(qa_pairs))


@pytest.fixture
def synthetic_corpus():
    return make_corpus
