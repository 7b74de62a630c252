from .templates import (
    AnnotationRecord,
    QuestionTemplate,
    instantiate_template,
    load_annotations,
    load_templates,
)
from .generator import extract_evidence, generate_dataset, generate_qa_pairs, make_question_id
