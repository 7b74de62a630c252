"""
Baseline evidence-line reader

Picks the note line that best matches the question. The lexical score is
the Jaccard overlap of normalized token sets; the optional knowledge score
is the best cosine similarity between fused (word + entity) vectors of the
question's entity mentions and the line's entity mentions.

    score(line) = (1 − λ)·jaccard + λ·max_cosine

Usage:
    from src.reader.baseline import ReaderConfig, KnowledgeResources, predict_dataset

    predictions = predict_dataset(dataset, ReaderConfig())
    predictions = predict_dataset(
        dataset,
        ReaderConfig(mode='lexical+knowledge', embedding_weight=0.5),
        KnowledgeResources(embeddings, params, lexicon, word_vectors),
    )
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Union

import numpy as np
from sklearn.metrics.pairwise import cosine_similarity
from tqdm import tqdm

from src.augmentation.linker import EntityLinker, tokenize
from src.corpus.model import AnswerSpan, ClinicalNote, Dataset
from src.evaluation.metrics import normalize_answer
from src.knowledge.kim import KimParams, align_entities_to_tokens, kim_fuse
from src.knowledge.transe import EmbeddingTable
from src.knowledge.vectors import WordVectors

logger = logging.getLogger(__name__)

LEXICAL = 'lexical'
KNOWLEDGE = 'lexical+knowledge'
MODES = (LEXICAL, KNOWLEDGE)


@dataclass(frozen=True)
class ReaderConfig:
    mode: str = LEXICAL
    embedding_weight: float = 0.0
    tie_break: str = 'earliest_line'

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.embedding_weight <= 1.0:
            raise ValueError(f"embedding_weight must lie in [0, 1], got {self.embedding_weight}")
        if self.mode == LEXICAL and self.embedding_weight != 0.0:
            raise ValueError("embedding_weight must be 0 in lexical mode")
        if self.tie_break != 'earliest_line':
            raise ValueError(f"Unsupported tie_break {self.tie_break!r}")


@dataclass
class KnowledgeResources:
    """Everything the knowledge term needs: embeddings, fusion weights, lexicon and word vectors"""
    embeddings: EmbeddingTable
    params: KimParams
    lexicon: Union[Mapping[str, str], EntityLinker]
    word_vectors: WordVectors
    linker: EntityLinker = field(init=False, repr=False)

    def __post_init__(self):
        self.linker = self.lexicon if isinstance(self.lexicon, EntityLinker) else EntityLinker(self.lexicon)

    def mention_vectors(self, text: str) -> np.ndarray:
        """Fused vectors at the first token of each linked mention, (n_mentions, d)"""
        mentions = [m for m in self.linker.link(text) if m.entity_id in self.embeddings.entity_vecs]
        if not mentions:
            return np.zeros((0, self.params.d))

        tokens = tokenize(text)
        words = self.word_vectors.embed([t.text for t in tokens])
        entities = align_entities_to_tokens(tokens, mentions, self.embeddings)
        fused = kim_fuse(words, entities, self.params)

        first_token = {t.start: i for i, t in enumerate(tokens)}
        return fused[[first_token[m.start] for m in mentions]]


def jaccard(a: set, b: set) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def max_cosine(left: np.ndarray, right: np.ndarray) -> float:
    if len(left) == 0 or len(right) == 0:
        return 0.0
    return float(cosine_similarity(left, right).max())


def predict_span(
    question: str,
    note: ClinicalNote,
    config: ReaderConfig,
    resources: Optional[KnowledgeResources] = None,
) -> AnswerSpan:
    """
    Highest-scoring non-blank line of the note (earliest line on ties)

    Args:
        question: Question text
        note: Context note
        config: Reader settings
        resources: Required in lexical+knowledge mode, ignored otherwise

    Returns:
        The chosen line as an AnswerSpan

    Raises:
        ValueError: every line is blank, or resources do not fit the mode
    """
    if config.mode == KNOWLEDGE and resources is None:
        raise ValueError("lexical+knowledge mode needs KnowledgeResources")

    candidates = [i for i in range(len(note.lines)) if note.line_text(i).strip()]
    if not candidates:
        raise ValueError(f"Note {note.note_id} has no non-blank line")

    question_tokens = set(normalize_answer(question).split())
    use_knowledge = config.mode == KNOWLEDGE
    question_vecs = resources.mention_vectors(question) if use_knowledge else None
    weight = config.embedding_weight

    best_index, best_score = None, -np.inf
    for index in candidates:
        line = note.line_text(index)
        score = jaccard(question_tokens, set(normalize_answer(line).split()))
        if use_knowledge:
            score = (1.0 - weight) * score + weight * max_cosine(question_vecs, resources.mention_vectors(line))
        if score > best_score:
            best_index, best_score = index, score

    start = note.lines[best_index][0]
    return AnswerSpan(text=note.line_text(best_index), answer_start=start)


def predict_dataset(
    dataset: Dataset,
    config: ReaderConfig,
    resources: Optional[KnowledgeResources] = None,
    progress: bool = False,
) -> Dict[str, str]:
    """
    Predict an answer line for every question

    Returns:
        question_id -> predicted answer text (the predictions-file mapping)
    """
    predictions = {}
    for qa in tqdm(dataset.qa_pairs, desc='Reading', disable=not progress):
        span = predict_span(qa.question, dataset.note(qa.note_id), config, resources)
        predictions[qa.question_id] = span.text
    logger.info(f"✅ Predicted {len(predictions):,} answers (mode={config.mode}, λ={config.embedding_weight})")
    return predictions
