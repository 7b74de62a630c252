"""
Question templates and entity annotations
Loading, placeholder parsing and template instantiation
"""

import logging
import re
from dataclasses import dataclass, field
from typing import List, Tuple

from src.utils.errors import AnnotationError, DatasetParseError, TemplateTypeError
from src.utils.io import PathLike, read_json

logger = logging.getLogger(__name__)

PLACEHOLDER_RE = re.compile(r'\|([a-z][a-z_]*)\|')


@dataclass(frozen=True)
class QuestionTemplate:
    """
    A question skeleton with |type| placeholders

    Example:
        >>> QuestionTemplate('t1', 'Has this patient ever been on |medication|?').placeholder_types
        ('medication',)
    """
    template_id: str
    text: str
    placeholder_types: Tuple[str, ...] = field(init=False, compare=False)

    def __post_init__(self):
        types = tuple(PLACEHOLDER_RE.findall(self.text))
        if not types:
            raise DatasetParseError(f"Template {self.template_id} has no |type| placeholder: {self.text!r}")
        object.__setattr__(self, 'placeholder_types', types)

    @property
    def binds(self) -> str:
        """Placeholder type when the template is single-typed, else ''"""
        types = set(self.placeholder_types)
        return types.pop() if len(types) == 1 else ''


@dataclass(frozen=True)
class AnnotationRecord:
    note_id: str
    surface: str
    type: str
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise AnnotationError(f"Annotation {self.surface!r} in {self.note_id} has start >= end")


def instantiate_template(template: QuestionTemplate, annotation: AnnotationRecord) -> str:
    """
    Replace every placeholder of a template with the annotation surface

    Raises:
        TemplateTypeError: a placeholder type differs from annotation.type

    Example:
        >>> instantiate_template(t, AnnotationRecord('n1', 'Flagyl', 'medication', 10, 16))
        'Has this patient ever been on Flagyl?'
    """
    for expected in template.placeholder_types:
        if expected != annotation.type:
            raise TemplateTypeError(template.template_id, expected, annotation.type)
    return PLACEHOLDER_RE.sub(lambda _: annotation.surface, template.text)


# ============================================================================
# FILE LOADING
# ============================================================================

def load_templates(path: PathLike) -> List[QuestionTemplate]:
    """Templates file: JSON array of {template_id, text}"""
    records = read_json(path)
    if not isinstance(records, list):
        raise DatasetParseError(f"{path}: expected a JSON array of templates")
    try:
        templates = [QuestionTemplate(str(r['template_id']), r['text']) for r in records]
    except (KeyError, TypeError) as e:
        raise DatasetParseError(f"{path}: template record missing {e}") from e

    multi = [t.template_id for t in templates if not t.binds]
    if multi:
        logger.warning(f"⚠️ {len(multi)} multi-type templates will never bind: {multi[:5]}")
    return templates


def load_annotations(path: PathLike) -> List[AnnotationRecord]:
    """Annotations file: JSON array of {note_id, surface, type, start, end}"""
    records = read_json(path)
    if not isinstance(records, list):
        raise DatasetParseError(f"{path}: expected a JSON array of annotations")
    try:
        return [
            AnnotationRecord(
                note_id=str(r['note_id']),
                surface=r['surface'],
                type=r['type'],
                start=int(r['start']),
                end=int(r['end']),
            )
            for r in records
        ]
    except (KeyError, TypeError) as e:
        raise DatasetParseError(f"{path}: annotation record missing {e}") from e
