"""
Easy / Hard question split

A template is Easy when its questions score higher on average than the
whole question set, and Hard otherwise (ties included). Labels are then
mapped back onto each question.

Usage:
    from src.evaluation.difficulty import partition_difficulty, label_questions, load_scores

    labels = partition_difficulty(load_scores('scores.csv'), template_of)
    per_question = label_questions(labels, template_of)
"""

import logging
from fractions import Fraction
from typing import Dict, Mapping

import numpy as np
import pandas as pd

from src.utils.errors import DataIntegrityError, DatasetParseError
from src.utils.io import PathLike

logger = logging.getLogger(__name__)

EASY = 'Easy'
HARD = 'Hard'


def partition_difficulty(per_question: Mapping[str, float], template_of: Mapping[str, str]) -> Dict[str, str]:
    """
    Label every template Easy or Hard

    Means are compared as exact fractions, so a template whose mean equals
    the overall mean is always Hard.

    Args:
        per_question: question_id -> score (EM, F1, or any real)
        template_of: question_id -> template_id

    Returns:
        template_id -> 'Easy' | 'Hard', in first-seen order

    Raises:
        ValueError: no scores, or a score is NaN or infinite
        DataIntegrityError: a scored question has no template
    """
    if not per_question:
        raise ValueError("partition_difficulty needs at least one scored question")

    total = Fraction(0)
    sums: Dict[str, Fraction] = {}
    counts: Dict[str, int] = {}
    for qid, score in per_question.items():
        if qid not in template_of:
            raise DataIntegrityError('scored question has no template', record_id=qid)
        if not np.isfinite(score):
            raise ValueError(f"Score of {qid} is not finite: {score}")
        value = Fraction(score)
        template_id = template_of[qid]
        total += value
        sums[template_id] = sums.get(template_id, Fraction(0)) + value
        counts[template_id] = counts.get(template_id, 0) + 1

    n = len(per_question)
    # template mean > overall mean  <=>  sum_t * n > total * n_t
    labels = {
        template_id: EASY if sums[template_id] * n > total * counts[template_id] else HARD
        for template_id in sums
    }
    n_easy = sum(1 for label in labels.values() if label == EASY)
    logger.info(f"📊 Templates: {n_easy} easy / {len(labels) - n_easy} hard")
    return labels


def label_questions(template_labels: Mapping[str, str], template_of: Mapping[str, str]) -> Dict[str, str]:
    """Carry template labels over to their questions (unlabelled templates are skipped)"""
    return {
        qid: template_labels[template_id]
        for qid, template_id in template_of.items()
        if template_id in template_labels
    }


def difficulty_distribution(question_labels: Mapping[str, str]) -> pd.DataFrame:
    """
    Easy / Hard / Total question counts with percentages

    Example:
        level  count  percent
        Easy   33037     73.1
        Hard   12155     26.9
        Total  45192    100.0
    """
    total = len(question_labels)
    rows = []
    for level in (EASY, HARD):
        count = sum(1 for label in question_labels.values() if label == level)
        rows.append({'level': level, 'count': count, 'percent': 100.0 * count / total if total else 0.0})
    rows.append({'level': 'Total', 'count': total, 'percent': 100.0 if total else 0.0})
    return pd.DataFrame(rows, columns=['level', 'count', 'percent'])


def load_scores(path: PathLike) -> Dict[str, float]:
    """
    Read a question_id,score CSV

    Raises:
        DatasetParseError: missing columns, duplicate ids, non-numeric or infinite scores
    """
    try:
        df = pd.read_csv(path, dtype={'question_id': str}, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DatasetParseError(f"{path}: malformed scores CSV ({e})") from e

    missing = {'question_id', 'score'} - set(df.columns)
    if missing:
        raise DatasetParseError(f"{path}: missing columns {sorted(missing)}")
    if df['question_id'].duplicated().any():
        dup = df.loc[df['question_id'].duplicated(), 'question_id'].iloc[0]
        raise DatasetParseError(f"{path}: duplicate question_id {dup!r}")

    scores = pd.to_numeric(df['score'], errors='coerce')
    if scores.isna().any():
        raise DatasetParseError(f"{path}: non-numeric score values")
    if not np.isfinite(scores).all():
        raise DatasetParseError(f"{path}: infinite score values")
    return dict(zip(df['question_id'], scores.astype(float)))
