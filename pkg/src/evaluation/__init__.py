from .metrics import exact_match_score, normalize_answer, token_f1_score
from .evaluate import (
    EvalReport,
    answers_as_predictions,
    evaluate_by_group,
    evaluate_predictions,
    load_predictions,
    save_report,
)
from .difficulty import (
    EASY,
    HARD,
    difficulty_distribution,
    label_questions,
    load_scores,
    partition_difficulty,
)
