"""
Answer normalization and EM / token-F1 scoring (SQuAD v1.1 semantics)
"""

import re
import string
from collections import Counter
from typing import Callable, Sequence

ARTICLES_RE = re.compile(r'\b(a|an|the)\b')
PUNCTUATION = frozenset(string.punctuation)


def normalize_answer(text: str) -> str:
    """
    Lower text and remove punctuation, articles and extra whitespace

    Example:
        >>> normalize_answer("The Patient's HTN.")
        'patients htn'
    """
    text = text.lower()
    text = ''.join(ch for ch in text if ch not in PUNCTUATION)
    text = ARTICLES_RE.sub(' ', text)
    return ' '.join(text.split())


def _check_golds(golds: Sequence[str]) -> None:
    if isinstance(golds, str):
        raise TypeError("golds must be a sequence of strings, not a string")
    if len(golds) == 0:
        raise ValueError("At least one gold answer is required")


def _max_over_golds(metric_fn: Callable[[str, str], float], prediction: str, golds: Sequence[str]) -> float:
    _check_golds(golds)
    return max(metric_fn(prediction, gold) for gold in golds)


def _exact_match(prediction: str, gold: str) -> int:
    return int(normalize_answer(prediction) == normalize_answer(gold))


def _token_f1(prediction: str, gold: str) -> float:
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    num_same = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    return 2.0 * num_same / (len(pred_tokens) + len(gold_tokens))


def exact_match_score(prediction: str, golds: Sequence[str]) -> int:
    """1 if the normalized prediction equals any normalized gold, else 0"""
    return int(_max_over_golds(_exact_match, prediction, golds))


def token_f1_score(prediction: str, golds: Sequence[str]) -> float:
    """
    Best bag-of-tokens F1 over the gold answers

    Example:
        >>> round(token_f1_score('no known drug allergies',
        ...                      ['ALLERGIES: He had no known drug allergies']), 4)
        0.7273
    """
    return float(_max_over_golds(_token_f1, prediction, golds))
