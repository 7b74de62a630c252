"""
QA pair generation from templates and annotations

Each annotation whose type matches a template fills the template's
placeholders; the full physical line around the annotation becomes the
gold answer (evidence span).

Usage:
    from src.generation.generator import generate_dataset
    dataset = generate_dataset(notes, templates, annotations, max_answer_tokens=20)
"""

import hashlib
import logging
from typing import Dict, List, Sequence, Tuple

from tqdm import tqdm

from src.corpus.model import AnswerSpan, ClinicalNote, Dataset, QAPair, whitespace_tokens
from src.utils.errors import AnnotationError

from .templates import AnnotationRecord, QuestionTemplate, instantiate_template

logger = logging.getLogger(__name__)


def make_question_id(template_id: str, note_id: str, surface: str) -> str:
    """Stable id of the (template, note, lowercased surface) group"""
    key = '\x1f'.join((template_id, note_id, surface.lower()))
    return hashlib.sha1(key.encode('utf-8')).hexdigest()[:16]


def extract_evidence(note: ClinicalNote, annotation: AnnotationRecord) -> AnswerSpan:
    """
    Full line around an annotation, with surrounding whitespace trimmed

    Args:
        note: Note holding the annotation
        annotation: Entity span inside the note

    Returns:
        AnswerSpan whose answer_start points at the first non-blank character

    Raises:
        AnnotationError: annotation outside the note, not matching its surface,
            or spanning a newline

    Example:
        line "  lasix 160 BID " -> AnswerSpan("lasix 160 BID", <offset of 'l'>)
    """
    text = note.text
    start, end = annotation.start, annotation.end
    if start < 0 or end > len(text):
        raise AnnotationError(
            f"Annotation {annotation.surface!r} [{start}, {end}) lies outside note {note.note_id}"
        )
    if '\n' in text[start:end]:
        raise AnnotationError(
            f"Annotation {annotation.surface!r} in note {note.note_id} spans a newline"
        )
    if text[start:end] != annotation.surface:
        raise AnnotationError(
            f"Annotation in note {note.note_id} reads {text[start:end]!r}, expected {annotation.surface!r}"
        )

    line_start = text.rfind('\n', 0, start) + 1
    line_end = text.find('\n', start)
    if line_end == -1:
        line_end = len(text)

    raw = text[line_start:line_end]
    leading = len(raw) - len(raw.lstrip())
    return AnswerSpan(text=raw.strip(), answer_start=line_start + leading)


def generate_qa_pairs(
    note: ClinicalNote,
    templates: Sequence[QuestionTemplate],
    annotations: Sequence[AnnotationRecord],
    max_answer_tokens: int,
) -> List[QAPair]:
    """
    Generate the QA pairs of one note

    Every (template, annotation) pair with matching types yields one
    question. Pairs sharing (template_id, note_id, lowercased surface) merge
    into a single QAPair collecting each occurrence's evidence line
    (deduplicated by span). Answers longer than max_answer_tokens are dropped,
    then QA pairs left without answers.

    Args:
        note: Clinical note
        templates: Question templates
        annotations: Annotations (those of other notes are ignored)
        max_answer_tokens: Length filter threshold

    Returns:
        QA pairs in order of first occurrence (templates outer, annotations inner)
    """
    own = [a for a in annotations if a.note_id == note.note_id]
    if len(own) != len(annotations):
        logger.debug(f"Ignoring {len(annotations) - len(own)} annotations of other notes")

    groups: Dict[Tuple[str, str], dict] = {}
    for template in templates:
        for annotation in own:
            if template.binds != annotation.type:
                continue
            key = (template.template_id, annotation.surface.lower())
            group = groups.get(key)
            if group is None:
                group = groups[key] = {
                    'template': template,
                    'surface': annotation.surface,
                    'question': instantiate_template(template, annotation),
                    'answers': {},
                }
            span = extract_evidence(note, annotation)
            group['answers'].setdefault((span.answer_start, span.text), span)

    qa_pairs = []
    dropped_answers = 0
    for (template_id, surface_key), group in groups.items():
        answers = []
        for span in group['answers'].values():
            if len(whitespace_tokens(span.text)) > max_answer_tokens:
                dropped_answers += 1
                continue
            answers.append(span)
        if not answers:
            continue
        qa_pairs.append(QAPair(
            question_id=make_question_id(template_id, note.note_id, surface_key),
            question=group['question'],
            note_id=note.note_id,
            answers=tuple(answers),
            template_id=template_id,
            entity_surface=group['surface'],
        ))

    if dropped_answers:
        logger.debug(f"{note.note_id}: dropped {dropped_answers} answers over {max_answer_tokens} tokens")
    return qa_pairs


def generate_dataset(
    notes: Sequence[ClinicalNote],
    templates: Sequence[QuestionTemplate],
    annotations: Sequence[AnnotationRecord],
    max_answer_tokens: int,
) -> Dataset:
    """
    Run generate_qa_pairs over every note

    Returns:
        Dataset holding all notes and their generated QA pairs
    """
    by_note: Dict[str, List[AnnotationRecord]] = {}
    for annotation in annotations:
        by_note.setdefault(annotation.note_id, []).append(annotation)

    known = {note.note_id for note in notes}
    orphans = [nid for nid in by_note if nid not in known]
    if orphans:
        logger.warning(f"⚠️ Annotations reference {len(orphans)} unknown notes: {orphans[:5]}")

    qa_pairs = []
    for note in tqdm(notes, desc='Generating', unit='note', disable=len(notes) < 50):
        qa_pairs.extend(generate_qa_pairs(note, templates, by_note.get(note.note_id, []), max_answer_tokens))

    logger.info(f"✅ Generated {len(qa_pairs):,} QA pairs from {len(notes):,} notes")
    return Dataset(notes=tuple(notes), qa_pairs=tuple(qa_pairs))
