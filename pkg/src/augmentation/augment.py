"""
Synonym augmentation of questions

A question is rewritten by replacing one linked entity mention with another
name of the same KB concept. Questions with no linkable mention, or whose
mentions have no alternative name, are filtered out. Answers and note
references are never touched.

Usage:
    from src.augmentation.augment import augment_dataset
    augmented = augment_dataset(dataset, kb, lexicon, seed=7)
"""

import logging
from typing import List, Mapping, Optional, Tuple, Union

from src.corpus.model import Dataset, QAPair
from src.utils.rng import derive_rng

from .kb import KnowledgeBase, lookup_synonyms
from .linker import EntityLinker, EntityMention, link_entities

logger = logging.getLogger(__name__)

Lexicon = Union[Mapping[str, str], EntityLinker]
Candidate = Tuple[EntityMention, str]


def substitution_candidates(question: str, kb: KnowledgeBase, lexicon: Lexicon) -> List[Candidate]:
    """
    Every (mention, replacement) pair available for a question

    Replacements are the entity's synonyms, plus its canonical name when the
    mention itself is an alias; the mention's own surface is never offered.
    Mentions of entities missing from the KB are skipped.
    """
    candidates = []
    for mention in link_entities(question, lexicon):
        if mention.entity_id not in kb.entities:
            logger.debug(f"Lexicon entity {mention.entity_id} not in KB; skipping")
            continue
        names = [kb.entity(mention.entity_id).canonical, *lookup_synonyms(kb, mention.entity_id)]
        for name in names:
            if name.casefold() != mention.surface.casefold():
                candidates.append((mention, name))
    return candidates


def apply_substitution(qa: QAPair, candidate: Candidate, index: int) -> QAPair:
    mention, replacement = candidate
    question = qa.question[:mention.start] + replacement + qa.question[mention.end:]

    entity_surface = qa.entity_surface
    if entity_surface is not None and entity_surface.casefold() == mention.surface.casefold():
        entity_surface = replacement

    return QAPair(
        question_id=f"{qa.question_id}-aug{index}",
        question=question,
        note_id=qa.note_id,
        answers=qa.answers,
        template_id=qa.template_id,
        entity_surface=entity_surface,
        augmentation={
            'source_question_id': qa.question_id,
            'original': mention.surface,
            'replacement': replacement,
            'entity_id': mention.entity_id,
        },
    )


def augment_question(qa: QAPair, kb: KnowledgeBase, lexicon: Lexicon, seed: int) -> Optional[QAPair]:
    """
    Rewrite one seeded-uniformly chosen (mention, synonym) pair

    The random stream is derived from (seed, question_id), so the choice for
    one question does not depend on the rest of the dataset.

    Returns:
        The rewritten QAPair, or None when the question is filtered

    Example:
        "Has this patient ever been on Flagyl?" -> "Has this patient ever been on Metronidazole?"
    """
    candidates = substitution_candidates(qa.question, kb, lexicon)
    if not candidates:
        return None
    index = int(derive_rng(seed, qa.question_id).integers(len(candidates)))
    return apply_substitution(qa, candidates[index], index)


def expand_question(qa: QAPair, kb: KnowledgeBase, lexicon: Lexicon) -> List[QAPair]:
    """One rewritten QAPair per substitution candidate, in candidate order"""
    candidates = substitution_candidates(qa.question, kb, lexicon)
    return [apply_substitution(qa, c, i) for i, c in enumerate(candidates)]


def augment_dataset(
    dataset: Dataset,
    kb: KnowledgeBase,
    lexicon: Mapping[str, str],
    seed: int,
    expand: bool = False,
) -> Dataset:
    """
    Augment every question of a dataset, dropping the unaugmentable ones

    Args:
        dataset: Source corpus (notes are kept as they are)
        kb: Knowledge base
        lexicon: {lowercase surface: entity_id}
        seed: Base seed (unused when expand=True)
        expand: Emit every candidate instead of one seeded pick

    Returns:
        Dataset of rewritten questions only
    """
    linker = EntityLinker(lexicon)
    augmented = []
    filtered = 0
    for qa in dataset.qa_pairs:
        if expand:
            variants = expand_question(qa, kb, linker)
        else:
            variant = augment_question(qa, kb, linker, seed)
            variants = [variant] if variant is not None else []
        if not variants:
            filtered += 1
        augmented.extend(variants)

    logger.info(
        f"✅ Augmented {dataset.n_questions - filtered:,}/{dataset.n_questions:,} questions "
        f"-> {len(augmented):,} rewritten ({filtered:,} filtered)"
    )
    return Dataset(notes=dataset.notes, qa_pairs=tuple(augmented))
