"""
Corpus statistics
Counts, whitespace-token averages and the key-phrase overlap rate
"""

import pandas as pd

from .model import Dataset, StatsReport


def _mean_tokens(texts) -> float:
    series = pd.Series(list(texts), dtype='object')
    if series.empty:
        return 0.0
    return float(series.str.split().str.len().mean())


def key_phrase_overlap(dataset: Dataset) -> float:
    """
    Fraction of QA pairs whose entity surface appears in one of their answers

    Matching is case-insensitive substring search. QA pairs without an
    entity surface are left out of the denominator.
    """
    with_entity = [qa for qa in dataset.qa_pairs if qa.entity_surface]
    if not with_entity:
        return 0.0
    hits = sum(
        any(qa.entity_surface.lower() in a.text.lower() for a in qa.answers)
        for qa in with_entity
    )
    return hits / len(with_entity)


def dataset_stats(dataset: Dataset) -> StatsReport:
    """
    Summary statistics of a corpus

    Averages are over raw whitespace tokens; answer averages count every
    gold span. An empty dataset yields a zeroed report.

    Example:
        >>> dataset_stats(ds).n_questions
        12
    """
    answers = [a.text for qa in dataset.qa_pairs for a in qa.answers]
    templates = {qa.template_id for qa in dataset.qa_pairs if qa.template_id is not None}

    return StatsReport(
        n_questions=dataset.n_questions,
        n_contexts=dataset.n_contexts,
        n_templates=len(templates),
        avg_question_tokens=_mean_tokens(qa.question for qa in dataset.qa_pairs),
        avg_answer_tokens=_mean_tokens(answers),
        avg_context_tokens=_mean_tokens(note.text for note in dataset.notes),
        key_phrase_overlap=key_phrase_overlap(dataset),
    )
