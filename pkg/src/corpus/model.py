"""
Corpus data types
Clinical notes, answer spans, QA pairs and the Dataset container

All types are frozen dataclasses; operations build new values instead of
mutating existing ones.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

Span = Tuple[int, int]


def compute_line_spans(text: str) -> Tuple[Span, ...]:
    """
    Character spans of the physical lines of a text

    Newline characters belong to no line; an empty text has one empty line.

    Example:
        >>> compute_line_spans('ab\\ncd')
        ((0, 2), (3, 5))
    """
    spans = []
    start = 0
    for part in text.split('\n'):
        spans.append((start, start + len(part)))
        start += len(part) + 1
    return tuple(spans)


def whitespace_tokens(text: str) -> List[str]:
    """Length/statistics tokenization: raw whitespace split, no normalization"""
    return text.split()


@dataclass(frozen=True)
class ClinicalNote:
    """A clinical document (the reading context) with its line structure"""
    note_id: str
    text: str
    lines: Tuple[Span, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'lines', compute_line_spans(self.text))

    def line_text(self, index: int) -> str:
        start, end = self.lines[index]
        return self.text[start:end]


@dataclass(frozen=True)
class AnswerSpan:
    text: str
    answer_start: int

    @property
    def answer_end(self) -> int:
        return self.answer_start + len(self.text)

    def matches(self, note_text: str) -> bool:
        return (
            0 <= self.answer_start
            and self.answer_end <= len(note_text)
            and note_text[self.answer_start:self.answer_end] == self.text
        )


@dataclass(frozen=True)
class QAPair:
    question_id: str
    question: str
    note_id: str
    answers: Tuple[AnswerSpan, ...]
    template_id: Optional[str] = None
    entity_surface: Optional[str] = None
    # Set only on questions rewritten by the augmentation module
    augmentation: Optional[Dict[str, str]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'answers', tuple(self.answers))

    @property
    def answer_texts(self) -> List[str]:
        return [a.text for a in self.answers]


@dataclass(frozen=True)
class Dataset:
    notes: Tuple[ClinicalNote, ...] = ()
    qa_pairs: Tuple[QAPair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'notes', tuple(self.notes))
        object.__setattr__(self, 'qa_pairs', tuple(self.qa_pairs))

    @cached_property
    def note_index(self) -> Dict[str, ClinicalNote]:
        return {note.note_id: note for note in self.notes}

    def note(self, note_id: str) -> ClinicalNote:
        return self.note_index[note_id]

    def qa_by_note(self) -> Dict[str, List[QAPair]]:
        """QA pairs grouped by note id, in note order then QA order"""
        grouped = {note.note_id: [] for note in self.notes}
        for qa in self.qa_pairs:
            grouped.setdefault(qa.note_id, []).append(qa)
        return grouped

    @property
    def n_questions(self) -> int:
        return len(self.qa_pairs)

    @property
    def n_contexts(self) -> int:
        return len(self.notes)


@dataclass(frozen=True)
class StatsReport:
    n_questions: int
    n_contexts: int
    n_templates: int
    avg_question_tokens: float
    avg_answer_tokens: float
    avg_context_tokens: float
    key_phrase_overlap: float

    def to_dict(self) -> Dict[str, float]:
        return {
            'n_questions': self.n_questions,
            'n_contexts': self.n_contexts,
            'n_templates': self.n_templates,
            'avg_question_tokens': self.avg_question_tokens,
            'avg_answer_tokens': self.avg_answer_tokens,
            'avg_context_tokens': self.avg_context_tokens,
            'key_phrase_overlap': self.key_phrase_overlap,
        }
