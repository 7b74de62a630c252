from .model import AnswerSpan, ClinicalNote, Dataset, QAPair, StatsReport
from .io import ValidationReport, load_dataset, load_notes, save_dataset, validate_dataset
from .splitting import split_by_documents, split_stats
from .stats import dataset_stats
from .sampling import sample_distinct_answers, sample_questions, sample_rate_grid
