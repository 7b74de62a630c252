"""
Clinical note section segmentation

Header lines are found with three heuristics (a colon-terminated short
phrase, short all-uppercase lines, or a lexicon hit); each section runs from
its header line up to the next header line. The section holding an answer
can then replace the whole note as a shorter reading context.

Usage:
    from src.segmentation.sections import detect_headers, segment_note, shorten_context
"""

import logging
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from src.corpus.model import AnswerSpan, ClinicalNote, Dataset, QAPair
from src.utils.config import HEADER_LEXICON_PATH, HEADER_MAX_TOKENS
from src.utils.errors import SectionBoundaryError
from src.utils.io import PathLike

logger = logging.getLogger(__name__)

COLON_HEADER_RE = re.compile(r'^([^:]+):$')


@dataclass(frozen=True)
class Section:
    header: Optional[str]
    start: int
    end: int

    def contains(self, answer: AnswerSpan) -> bool:
        return self.start <= answer.answer_start and answer.answer_end <= self.end


def load_header_lexicon(path: Optional[PathLike] = None) -> List[str]:
    """
    Read a header lexicon: one lowercase phrase per line, '#' comments allowed

    Args:
        path: Lexicon file (defaults to the shipped lexicon)
    """
    path = path or HEADER_LEXICON_PATH
    phrases = []
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            phrase = line.strip().lower()
            if phrase and not phrase.startswith('#'):
                phrases.append(phrase)
    return phrases


def is_header_line(line: str, lexicon: Iterable[str], max_tokens: int = HEADER_MAX_TOKENS) -> bool:
    stripped = line.strip()
    if not stripped:
        return False

    # (a) "<phrase>:" with a short phrase
    match = COLON_HEADER_RE.match(stripped)
    if match and 1 <= len(match.group(1).split()) <= max_tokens:
        return True

    # (b) short line whose letters are all uppercase
    letters = [ch for ch in stripped if ch.isalpha()]
    if letters and all(ch.isupper() for ch in letters) and len(stripped.split()) <= max_tokens:
        return True

    # (c) known header phrase
    return stripped.strip(':').strip().lower() in lexicon


def detect_headers(note: ClinicalNote, header_lexicon: Sequence[str]) -> List[int]:
    """
    Indices of the note's header lines

    Example:
        "ALLERGIES:" and "MEDICATIONS ON DISCHARGE" are headers,
        "He had no known drug allergies" is not.
    """
    lexicon = frozenset(p.lower() for p in header_lexicon)
    return [
        idx for idx in range(len(note.lines))
        if is_header_line(note.line_text(idx), lexicon)
    ]


def segment_note(note: ClinicalNote, headers: Sequence[int]) -> List[Section]:
    """
    Cut a note into sections at header lines

    Text before the first header becomes a headerless preamble; with no
    headers the whole note is one section. Section spans partition
    [0, len(note.text)).

    Args:
        note: Clinical note
        headers: Ascending, valid line indices

    Returns:
        Ordered sections
    """
    headers = list(headers)
    if headers != sorted(set(headers)):
        raise ValueError(f"Header indices must be strictly ascending: {headers}")
    if headers and (headers[0] < 0 or headers[-1] >= len(note.lines)):
        raise ValueError(f"Header index out of range for note {note.note_id}")

    starts = [note.lines[idx][0] for idx in headers]
    sections = []
    if not starts or starts[0] > 0:
        end = starts[0] if starts else len(note.text)
        sections.append(Section(header=None, start=0, end=end))

    for pos, idx in enumerate(headers):
        end = starts[pos + 1] if pos + 1 < len(starts) else len(note.text)
        sections.append(Section(header=note.line_text(idx).strip(), start=starts[pos], end=end))
    return sections


def shorten_context(
    qa: QAPair,
    note: ClinicalNote,
    sections: Sequence[Section],
) -> Tuple[str, List[AnswerSpan]]:
    """
    Section holding the QA pair's first fully-contained answer

    Every answer lying inside that section is remapped relative to the
    section start; answer texts are unchanged.

    Raises:
        SectionBoundaryError: no answer fits inside a single section

    Example:
        answer at 612 inside section [500, 800) -> 300-char text, answer_start 112
    """
    section = sections[answer_section_index(qa, note, sections)]
    remapped = [
        AnswerSpan(text=a.text, answer_start=a.answer_start - section.start)
        for a in qa.answers if section.contains(a)
    ]
    return note.text[section.start:section.end], remapped


def answer_section_index(qa: QAPair, note: ClinicalNote, sections: Sequence[Section]) -> int:
    """Index of the section holding the first answer that fits wholly in one section"""
    for answer in qa.answers:
        for idx, section in enumerate(sections):
            if section.contains(answer):
                return idx
    raise SectionBoundaryError(
        f"Question {qa.question_id}: every answer crosses a section boundary in note {note.note_id}"
    )


def shorten_dataset(dataset: Dataset, header_lexicon: Sequence[str]) -> Dataset:
    """
    Replace every QA pair's note with its answer-bearing section

    Each distinct section becomes a note with id "<note_id>#s<index>".
    QA pairs whose answers all cross section boundaries are dropped.
    """
    sections_by_note = {
        note.note_id: segment_note(note, detect_headers(note, header_lexicon))
        for note in dataset.notes
    }

    section_notes = {}
    qa_pairs = []
    dropped = 0
    for qa in dataset.qa_pairs:
        note = dataset.note(qa.note_id)
        sections = sections_by_note[qa.note_id]
        try:
            index = answer_section_index(qa, note, sections)
        except SectionBoundaryError as e:
            logger.debug(str(e))
            dropped += 1
            continue

        text, answers = shorten_context(qa, note, sections)
        section_id = f"{qa.note_id}#s{index}"
        section_notes.setdefault(section_id, ClinicalNote(section_id, text))
        qa_pairs.append(QAPair(
            question_id=qa.question_id,
            question=qa.question,
            note_id=section_id,
            answers=tuple(answers),
            template_id=qa.template_id,
            entity_surface=qa.entity_surface,
            augmentation=qa.augmentation,
        ))

    if dropped:
        logger.warning(f"⚠️ Dropped {dropped} QA pairs whose answers cross section boundaries")
    logger.info(
        f"✅ Shortened {len(qa_pairs):,} QA pairs onto {len(section_notes):,} sections"
    )
    return Dataset(notes=tuple(section_notes.values()), qa_pairs=tuple(qa_pairs))
