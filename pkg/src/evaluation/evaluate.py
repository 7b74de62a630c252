"""
Dataset-level evaluation
Scores a predictions file (question_id -> answer string) against a corpus.
The same computation measures agreement between two annotation sets: feed
one set's answers as the predictions and the other set as gold.

Usage:
    from src.evaluation.evaluate import evaluate_predictions, load_predictions

    report = evaluate_predictions(load_predictions('pred.json'), load_dataset('gold.json'))
    print(report.exact_match, report.f1)
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import pandas as pd

from src.corpus.model import Dataset
from src.utils.errors import DatasetParseError, MissingPredictionError
from src.utils.io import ArtifactSaver, PathLike, read_json

from .metrics import exact_match_score, token_f1_score

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    """
    Aggregate and per-question scores

    exact_match and f1 are percentages (mean of per-question values × 100).
    per_question maps question_id -> (em in {0, 1}, f1 in [0, 1]).
    """
    exact_match: float
    f1: float
    n_evaluated: int
    per_question: Dict[str, Tuple[int, float]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'exact_match': self.exact_match,
            'f1': self.f1,
            'n_evaluated': self.n_evaluated,
            'per_question': {
                qid: {'em': em, 'f1': f1} for qid, (em, f1) in self.per_question.items()
            },
        }


def _aggregate(scores: Mapping[str, Tuple[int, float]]) -> Tuple[float, float]:
    if not scores:
        return 0.0, 0.0
    n = len(scores)
    em = 100.0 * sum(s[0] for s in scores.values()) / n
    f1 = 100.0 * sum(s[1] for s in scores.values()) / n
    return em, f1


def evaluate_predictions(predictions: Mapping[str, str], dataset: Dataset) -> EvalReport:
    """
    EM / F1 of predictions against each question's gold answer texts

    Predictions for ids not in the dataset are ignored.

    Raises:
        MissingPredictionError: a dataset question has no prediction

    Example:
        two questions scoring (1, 1.0) and (0, 0.5) -> EM 50.0, F1 75.0
    """
    per_question = {}
    for qa in dataset.qa_pairs:
        if qa.question_id not in predictions:
            raise MissingPredictionError(qa.question_id)
        prediction = predictions[qa.question_id]
        golds = qa.answer_texts
        per_question[qa.question_id] = (
            exact_match_score(prediction, golds),
            token_f1_score(prediction, golds),
        )

    extra = len(set(predictions) - set(per_question))
    if extra:
        logger.warning(f"⚠️ Ignoring {extra} predictions for questions not in the gold set")

    em, f1 = _aggregate(per_question)
    logger.info(f"📊 EM = {em:.2f}, F1 = {f1:.2f} over {len(per_question):,} questions")
    return EvalReport(exact_match=em, f1=f1, n_evaluated=len(per_question), per_question=per_question)


def evaluate_by_group(report: EvalReport, group_of: Mapping[str, str]) -> pd.DataFrame:
    """
    Break a report down by question group (e.g. Easy/Hard)

    Questions without a group only count toward the Total row.

    Returns:
        DataFrame with columns group, exact_match, f1, n; groups sorted by
        name, then a 'Total' row
    """
    grouped: Dict[str, Dict[str, Tuple[int, float]]] = {}
    for qid, scores in report.per_question.items():
        group = group_of.get(qid)
        if group is not None:
            grouped.setdefault(group, {})[qid] = scores

    rows = []
    for group in sorted(grouped):
        em, f1 = _aggregate(grouped[group])
        rows.append({'group': group, 'exact_match': em, 'f1': f1, 'n': len(grouped[group])})
    rows.append({
        'group': 'Total', 'exact_match': report.exact_match, 'f1': report.f1, 'n': report.n_evaluated,
    })
    return pd.DataFrame(rows, columns=['group', 'exact_match', 'f1', 'n'])


# ============================================================================
# FILES
# ============================================================================

def save_report(report: EvalReport, path: PathLike) -> Path:
    return ArtifactSaver.save_json(report.to_dict(), path)


def load_predictions(path: PathLike) -> Dict[str, str]:
    """
    Read a predictions file: JSON object question_id -> answer string

    Raises:
        DatasetParseError: not an object of strings
    """
    payload = read_json(path)
    if not isinstance(payload, dict) or not all(isinstance(v, str) for v in payload.values()):
        raise DatasetParseError(f"{path}: predictions must be a JSON object of question_id -> string")
    return {str(k): v for k, v in payload.items()}


def answers_as_predictions(dataset: Dataset) -> Dict[str, str]:
    """First answer text of every question, for annotation-agreement scoring"""
    return {qa.question_id: qa.answers[0].text for qa in dataset.qa_pairs if qa.answers}
