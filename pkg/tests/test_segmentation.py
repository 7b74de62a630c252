"""
Tests for section header detection, segmentation and context shortening
"""

import numpy as np
import pytest

from src.corpus import AnswerSpan, ClinicalNote, Dataset, QAPair, validate_dataset
from src.segmentation import (
    detect_headers,
    load_header_lexicon,
    segment_note,
    shorten_context,
    shorten_dataset,
)
from src.segmentation.sections import is_header_line
from src.utils.errors import SectionBoundaryError

HEADER_POOL = ['ALLERGIES:', 'MEDICATIONS ON DISCHARGE', 'Hospital Course:', 'Plan', 'PHYSICAL EXAM']
BODY_POOL = [
    'He had no known drug allergies',
    'Lasix 40 mg PO daily.',
    'Patient was admitted with chest pain.',
    'Vitals stable, afebrile overnight.',
    '',
]


@pytest.fixture(scope='module')
def header_lexicon():
    return load_header_lexicon()


@pytest.fixture(scope='module')
def random_notes():
    """20 notes mixing header and body lines, some starting without a header"""
    rng = np.random.default_rng(11)
    notes = []
    for i in range(20):
        lines = []
        for _ in range(int(rng.integers(3, 12))):
            pool = HEADER_POOL if rng.random() < 0.3 else BODY_POOL
            lines.append(pool[int(rng.integers(len(pool)))])
        notes.append(ClinicalNote(f"s{i:02d}", '\n'.join(lines)))
    return notes


# ============================================================================
# HEADER DETECTION
# ============================================================================

@pytest.mark.parametrize('line, expected', [
    ('ALLERGIES:', True),
    ('MEDICATIONS ON DISCHARGE', True),
    ('Hospital Course:', True),
    ('Plan', True),                                          # lexicon only
    ('  Discharge Medications  ', True),                     # lexicon, padded
    ('He had no known drug allergies', False),
    ('Patient is allergic to penicillin.', False),
    ('The patient was seen today by the team:', False),     # colon phrase too long
    ('', False),
])
def test_is_header_line(line, expected, header_lexicon):
    assert is_header_line(line, frozenset(header_lexicon)) is expected


def test_lexicon_file_skips_comments(header_lexicon):
    assert 'allergies' in header_lexicon
    assert not any(p.startswith('#') for p in header_lexicon)


def test_fixture_headers(corpus, header_lexicon):
    assert detect_headers(corpus.note('n1'), header_lexicon) == [0, 1, 3, 5]
    assert detect_headers(corpus.note('n2'), header_lexicon) == [0, 1, 4, 6]
    assert detect_headers(corpus.note('n3'), header_lexicon) == [0, 1, 3, 5]


# ============================================================================
# SEGMENTATION
# ============================================================================

def test_sections_partition_the_text(random_notes, header_lexicon):
    for note in random_notes:
        sections = segment_note(note, detect_headers(note, header_lexicon))
        assert sections[0].start == 0
        assert sections[-1].end == len(note.text)
        for left, right in zip(sections, sections[1:]):
            assert left.end == right.start
        assert ''.join(note.text[s.start:s.end] for s in sections) == note.text


def test_preamble_and_headerless_notes():
    note = ClinicalNote('p', 'intro line\nALLERGIES:\nnone')
    sections = segment_note(note, [1])
    assert [s.header for s in sections] == [None, 'ALLERGIES:']
    assert note.text[sections[0].start:sections[0].end] == 'intro line\n'

    whole = segment_note(note, [])
    assert len(whole) == 1
    assert (whole[0].start, whole[0].end) == (0, len(note.text))


@pytest.mark.parametrize('headers', [[2, 1], [1, 1], [7]])
def test_invalid_header_indices(headers):
    note = ClinicalNote('p', 'a\nb\nc')
    with pytest.raises(ValueError):
        segment_note(note, headers)


# ============================================================================
# SHORTENING
# ============================================================================

def test_shorten_context_remaps_offsets(corpus, header_lexicon):
    note = corpus.note('n1')
    qa = next(q for q in corpus.qa_pairs if q.question_id == 'q03')
    sections = segment_note(note, detect_headers(note, header_lexicon))

    text, answers = shorten_context(qa, note, sections)
    assert text == 'ALLERGIES:\nPatient is allergic to penicillin.\n'
    assert answers == [AnswerSpan('Patient is allergic to penicillin.', 11)]


def test_shortening_preserves_every_answer_text(corpus, header_lexicon):
    for qa in corpus.qa_pairs:
        note = corpus.note(qa.note_id)
        sections = segment_note(note, detect_headers(note, header_lexicon))
        text, answers = shorten_context(qa, note, sections)
        assert answers
        for answer in answers:
            assert text[answer.answer_start:answer.answer_end] == answer.text


def test_boundary_crossing_answer_errors(header_lexicon):
    note = ClinicalNote('x', 'HISTORY:\nchest pain.\nALLERGIES:\nnone')
    qa = QAPair('qx', 'What is the status of chest pain?', 'x', (AnswerSpan('chest pain.\nALLERGIES:', 9),))
    sections = segment_note(note, detect_headers(note, header_lexicon))

    with pytest.raises(SectionBoundaryError):
        shorten_context(qa, note, sections)


def test_shorten_dataset(corpus, header_lexicon):
    shortened = shorten_dataset(corpus, header_lexicon)

    assert shortened.n_questions == 12
    assert validate_dataset(shortened).is_clean
    assert all('#s' in n.note_id for n in shortened.notes)

    q11 = next(q for q in shortened.qa_pairs if q.question_id == 'q11')
    assert q11.note_id == 'n3#s1'
    assert q11.answer_texts == ['Right hand ganglion cyst.']


def test_shorten_dataset_drops_crossing_pairs(header_lexicon):
    note = ClinicalNote('x', 'HISTORY:\nchest pain.\nALLERGIES:\nnone')
    good = QAPair('ok', 'Any allergies?', 'x', (AnswerSpan('none', 32),))
    bad = QAPair('qx', 'What is the status of chest pain?', 'x', (AnswerSpan('chest pain.\nALLERGIES:', 9),))

    shortened = shorten_dataset(Dataset(notes=(note,), qa_pairs=(good, bad)), header_lexicon)
    assert [qa.question_id for qa in shortened.qa_pairs] == ['ok']
