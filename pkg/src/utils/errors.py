"""Exception types raised across the toolkit."""

from typing import Optional


class ToolkitError(Exception):
    """Base class for every data/validation failure the CLI reports with exit 1"""


class DatasetParseError(ToolkitError, ValueError):
    """Input file is not valid JSON or misses required keys"""


class DataIntegrityError(ToolkitError, ValueError):
    """A record violates a corpus invariant"""

    def __init__(self, message: str, record_id: Optional[str] = None):
        super().__init__(f"{record_id}: {message}" if record_id else message)
        self.record_id = record_id


class TemplateTypeError(ToolkitError, ValueError):
    def __init__(self, template_id: str, expected: str, actual: str):
        super().__init__(
            f"Template {template_id} expects |{expected}| but annotation has type {actual!r}"
        )
        self.template_id = template_id
        self.expected = expected
        self.actual = actual


class AnnotationError(ToolkitError, ValueError):
    """Annotation lies outside its note or crosses a line break"""


class SectionBoundaryError(ToolkitError, ValueError):
    """No answer of a QA pair fits inside a single section"""


class UnknownEntityError(ToolkitError, KeyError):
    def __init__(self, entity_id: str, what: str = 'entity'):
        super().__init__(f"Unknown {what}: {entity_id!r}")
        self.entity_id = entity_id

    def __str__(self) -> str:
        return self.args[0]


class DimensionMismatchError(ToolkitError, ValueError):
    pass


class TrainingDivergenceError(ToolkitError, ArithmeticError):
    """TransE loss became NaN/inf"""

    def __init__(self, epoch: int, batch: int, diagnostics: dict):
        details = ', '.join(f"{k}={v}" for k, v in diagnostics.items())
        super().__init__(f"Non-finite loss at epoch {epoch}, batch {batch} ({details})")
        self.epoch = epoch
        self.batch = batch
        self.diagnostics = diagnostics


class MissingPredictionError(ToolkitError, KeyError):
    def __init__(self, question_id: str):
        super().__init__(f"No prediction for question {question_id!r}")
        self.question_id = question_id

    def __str__(self) -> str:
        return self.args[0]
