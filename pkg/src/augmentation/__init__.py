from .kb import (
    EntityRecord,
    KnowledgeBase,
    Triple,
    build_lexicon,
    load_knowledge_base,
    load_lexicon,
    lookup_synonyms,
)
from .linker import EntityLinker, EntityMention, Token, link_entities, tokenize
from .augment import augment_dataset, augment_question, expand_question, substitution_candidates
