"""
Corpus JSON interchange format
Load, save and validate datasets

File layout (UTF-8, answer_start counted in Unicode code points):

    {"notes": [{"note_id", "text"}],
     "qa_pairs": [{"question_id", "question", "note_id",
                   "answers": [{"text", "answer_start"}],
                   "template_id", "entity_surface"}]}

Usage:
    from src.corpus.io import load_dataset, save_dataset, validate_dataset
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.utils.errors import DataIntegrityError, DatasetParseError
from src.utils.io import ArtifactSaver, PathLike, read_json

from .model import AnswerSpan, ClinicalNote, Dataset, QAPair, whitespace_tokens

logger = logging.getLogger(__name__)

# Violation kinds that make a dataset unloadable (length is only a filter concern)
INTEGRITY_KINDS = (
    'duplicate_note', 'duplicate_question', 'dangling_note',
    'empty_question', 'no_answers', 'offset_mismatch',
)


# ============================================================================
# VALIDATION
# ============================================================================

@dataclass(frozen=True)
class Violation:
    kind: str
    record_id: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return not self.violations

    @property
    def integrity_violations(self) -> List[Violation]:
        return [v for v in self.violations if v.kind in INTEGRITY_KINDS]

    @property
    def length_violations(self) -> List[Violation]:
        return [v for v in self.violations if v.kind == 'answer_too_long']

    def to_dict(self) -> Dict[str, Any]:
        return {
            'clean': self.is_clean,
            'violations': [
                {'kind': v.kind, 'record_id': v.record_id, 'message': v.message}
                for v in self.violations
            ],
        }


def validate_dataset(dataset: Dataset, max_answer_tokens: Optional[int] = None) -> ValidationReport:
    """
    List every invariant violation of a dataset

    Violations are report entries, never exceptions. An answer is too long
    when it has strictly more than `max_answer_tokens` whitespace tokens.

    Args:
        dataset: Dataset to check
        max_answer_tokens: Length filter threshold (None skips the length check)

    Returns:
        ValidationReport, empty iff the dataset is clean

    Example:
        >>> validate_dataset(dataset, max_answer_tokens=20).is_clean
        True
    """
    violations = []

    seen_notes = set()
    for note in dataset.notes:
        if note.note_id in seen_notes:
            violations.append(Violation('duplicate_note', note.note_id, 'note_id is not unique'))
        seen_notes.add(note.note_id)

    notes = {note.note_id: note for note in dataset.notes}
    seen_questions = set()

    for qa in dataset.qa_pairs:
        qid = qa.question_id
        if qid in seen_questions:
            violations.append(Violation('duplicate_question', qid, 'question_id is not unique'))
        seen_questions.add(qid)

        if not qa.question.strip():
            violations.append(Violation('empty_question', qid, 'question text is empty'))
        if not qa.answers:
            violations.append(Violation('no_answers', qid, 'QA pair has no answers'))

        note = notes.get(qa.note_id)
        if note is None:
            violations.append(Violation('dangling_note', qid, f"note_id {qa.note_id!r} does not resolve"))

        for idx, answer in enumerate(qa.answers):
            if note is not None and not answer.matches(note.text):
                found = note.text[answer.answer_start:answer.answer_end]
                violations.append(Violation(
                    'offset_mismatch', qid,
                    f"answer {idx} at {answer.answer_start} reads {found!r}, expected {answer.text!r}",
                ))
            if max_answer_tokens is not None:
                n_tokens = len(whitespace_tokens(answer.text))
                if n_tokens > max_answer_tokens:
                    violations.append(Violation(
                        'answer_too_long', qid,
                        f"answer {idx} has {n_tokens} tokens (max {max_answer_tokens})",
                    ))

    return ValidationReport(violations)


# ============================================================================
# SERIALIZATION
# ============================================================================

def _require(record: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(record, dict) or key not in record:
        raise DatasetParseError(f"{where}: missing key {key!r}")
    return record[key]


def note_from_dict(record: Dict[str, Any]) -> ClinicalNote:
    return ClinicalNote(
        note_id=str(_require(record, 'note_id', 'note')),
        text=_require(record, 'text', f"note {record.get('note_id')}"),
    )


def qa_from_dict(record: Dict[str, Any]) -> QAPair:
    qid = str(_require(record, 'question_id', 'qa_pair'))
    answers = []
    for answer in _require(record, 'answers', qid):
        answers.append(AnswerSpan(
            text=_require(answer, 'text', qid),
            answer_start=int(_require(answer, 'answer_start', qid)),
        ))
    return QAPair(
        question_id=qid,
        question=_require(record, 'question', qid),
        note_id=str(_require(record, 'note_id', qid)),
        answers=tuple(answers),
        template_id=record.get('template_id'),
        entity_surface=record.get('entity_surface'),
        augmentation=record.get('augmentation'),
    )


def qa_to_dict(qa: QAPair) -> Dict[str, Any]:
    record = {
        'question_id': qa.question_id,
        'question': qa.question,
        'note_id': qa.note_id,
        'answers': [{'text': a.text, 'answer_start': a.answer_start} for a in qa.answers],
        'template_id': qa.template_id,
        'entity_surface': qa.entity_surface,
    }
    if qa.augmentation:
        record['augmentation'] = dict(sorted(qa.augmentation.items()))
    return record


def dataset_to_dict(dataset: Dataset) -> Dict[str, Any]:
    return {
        'notes': [{'note_id': n.note_id, 'text': n.text} for n in dataset.notes],
        'qa_pairs': [qa_to_dict(qa) for qa in dataset.qa_pairs],
    }


def dataset_from_dict(payload: Any) -> Dataset:
    if not isinstance(payload, dict) or 'notes' not in payload or 'qa_pairs' not in payload:
        raise DatasetParseError("corpus file must be an object with 'notes' and 'qa_pairs'")
    return Dataset(
        notes=tuple(note_from_dict(n) for n in payload['notes']),
        qa_pairs=tuple(qa_from_dict(q) for q in payload['qa_pairs']),
    )


def load_dataset(path: PathLike) -> Dataset:
    """
    Load a corpus file and verify its invariants

    Args:
        path: JSON interchange file

    Returns:
        Dataset

    Raises:
        DatasetParseError: malformed JSON or missing keys
        DataIntegrityError: first integrity violation, naming the record
    """
    dataset = dataset_from_dict(read_json(path))

    problems = validate_dataset(dataset).integrity_violations
    if problems:
        first = problems[0]
        if len(problems) > 1:
            logger.error(f"❌ {len(problems)} integrity violations in {path}")
        raise DataIntegrityError(first.message, record_id=first.record_id)

    logger.info(f"✅ Loaded {dataset.n_questions:,} questions over {dataset.n_contexts:,} notes from {path}")
    return dataset


def save_dataset(dataset: Dataset, path: PathLike) -> Path:
    """Write a corpus file; identical datasets give byte-identical files"""
    return ArtifactSaver.save_json(dataset_to_dict(dataset), path)


def load_notes(path: PathLike) -> List[ClinicalNote]:
    """
    Load notes from a JSON array of {note_id, text} or a corpus-shaped object

    Raises:
        DataIntegrityError: duplicate note ids
    """
    payload = read_json(path)
    records = payload.get('notes') if isinstance(payload, dict) else payload
    if not isinstance(records, list):
        raise DatasetParseError(f"{path}: expected a list of notes")

    notes = [note_from_dict(r) for r in records]
    seen = set()
    for note in notes:
        if note.note_id in seen:
            raise DataIntegrityError('note_id is not unique', record_id=note.note_id)
        seen.add(note.note_id)
    return notes


def subset_dataset(dataset: Dataset, note_ids: Sequence[str]) -> Dataset:
    """Notes with the given ids (in the given order) and the QA pairs attached to them"""
    wanted = set(note_ids)
    index = dataset.note_index
    return Dataset(
        notes=tuple(index[nid] for nid in note_ids),
        qa_pairs=tuple(qa for qa in dataset.qa_pairs if qa.note_id in wanted),
    )
