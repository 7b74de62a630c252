"""
Knowledge base of clinical concepts
Entity records (canonical name + aliases) and relation triples

File formats:
    entities: JSON array of {"entity_id", "canonical", "aliases"}
    triples:  TSV rows head<TAB>relation<TAB>tail (no header)
    lexicon:  TSV rows surface<TAB>entity_id (no header)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from src.utils.config import DEFAULT_RELATIONS
from src.utils.errors import DataIntegrityError, DatasetParseError, UnknownEntityError
from src.utils.io import PathLike, read_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    canonical: str
    aliases: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str

    def as_tuple(self) -> Tuple[str, str, str]:
        return (self.head, self.relation, self.tail)


@dataclass(frozen=True)
class KnowledgeBase:
    """
    Concepts and relations

    Invariants (checked on construction): alias lists hold no duplicates,
    triple endpoints resolve, relation names come from `relations`.
    """
    entities: Mapping[str, EntityRecord]
    triples: Tuple[Triple, ...] = ()
    relations: FrozenSet[str] = field(default=DEFAULT_RELATIONS)

    def __post_init__(self):
        object.__setattr__(self, 'triples', tuple(self.triples))
        for record in self.entities.values():
            if len(set(record.aliases)) != len(record.aliases):
                raise DataIntegrityError('alias list has duplicates', record_id=record.entity_id)
        for triple in self.triples:
            for endpoint in (triple.head, triple.tail):
                if endpoint not in self.entities:
                    raise DataIntegrityError(
                        f"triple {triple.as_tuple()} references unknown entity", record_id=endpoint
                    )
            if triple.relation not in self.relations:
                raise DataIntegrityError(
                    f"relation {triple.relation!r} not in {sorted(self.relations)}",
                    record_id=triple.head,
                )

    def entity(self, entity_id: str) -> EntityRecord:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    @property
    def entity_ids(self) -> List[str]:
        return list(self.entities)

    @property
    def relation_names(self) -> List[str]:
        """Relations used by at least one triple, in first-use order"""
        return list(dict.fromkeys(t.relation for t in self.triples))


def lookup_synonyms(kb: KnowledgeBase, entity_id: str) -> List[str]:
    """
    Aliases of an entity without its canonical form, deduplicated, in order

    Comparison is case-insensitive.

    Raises:
        UnknownEntityError: entity_id not in the KB

    Example:
        >>> lookup_synonyms(kb, 'E1')   # canonical 'Flagyl'
        ['Metronidazole']
    """
    record = kb.entity(entity_id)
    seen = {record.canonical.casefold()}
    synonyms = []
    for alias in record.aliases:
        key = alias.casefold()
        if key in seen:
            continue
        seen.add(key)
        synonyms.append(alias)
    return synonyms


# ============================================================================
# FILE LOADING
# ============================================================================

def _read_tsv(path: PathLike, names: Sequence[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(
            path, sep='\t', header=None, names=list(names), dtype=str,
            keep_default_na=False, comment='#', quoting=3,
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(names))
    except pd.errors.ParserError as e:
        raise DatasetParseError(f"{path}: malformed TSV ({e})") from e
    if df.empty:
        return df
    return df.apply(lambda col: col.str.strip())


def load_knowledge_base(
    entities_path: PathLike,
    triples_path: Optional[PathLike] = None,
    relations: Optional[Iterable[str]] = None,
) -> KnowledgeBase:
    """
    Load entity records and (optionally) relation triples

    Args:
        entities_path: JSON array of {entity_id, canonical, aliases}
        triples_path: head/relation/tail TSV
        relations: Allowed relation names (defaults to DEFAULT_RELATIONS)
    """
    records = read_json(entities_path)
    if not isinstance(records, list):
        raise DatasetParseError(f"{entities_path}: expected a JSON array of entities")

    entities: Dict[str, EntityRecord] = {}
    for r in records:
        try:
            record = EntityRecord(str(r['entity_id']), r['canonical'], tuple(r.get('aliases', ())))
        except (KeyError, TypeError) as e:
            raise DatasetParseError(f"{entities_path}: entity record missing {e}") from e
        if record.entity_id in entities:
            raise DataIntegrityError('duplicate entity_id', record_id=record.entity_id)
        entities[record.entity_id] = record

    triples = []
    if triples_path is not None:
        df = _read_tsv(triples_path, ['head', 'relation', 'tail'])
        triples = [Triple(h, r, t) for h, r, t in df.itertuples(index=False)]

    kb = KnowledgeBase(
        entities=entities,
        triples=tuple(triples),
        relations=frozenset(relations) if relations else DEFAULT_RELATIONS,
    )
    logger.info(f"✅ Knowledge base: {len(entities):,} entities, {len(triples):,} triples")
    return kb


def load_lexicon(path: PathLike) -> Dict[str, str]:
    """surface<TAB>entity_id rows -> {lowercased surface: entity_id}; first row wins"""
    df = _read_tsv(path, ['surface', 'entity_id'])
    lexicon: Dict[str, str] = {}
    for surface, entity_id in df.itertuples(index=False):
        lexicon.setdefault(surface.lower(), entity_id)
    return lexicon


def build_lexicon(kb: KnowledgeBase) -> Dict[str, str]:
    """Lexicon from every canonical name and alias of the KB"""
    lexicon: Dict[str, str] = {}
    collisions = 0
    for record in kb.entities.values():
        for surface in (record.canonical, *record.aliases):
            key = surface.lower()
            owner = lexicon.setdefault(key, record.entity_id)
            if owner != record.entity_id:
                collisions += 1
    if collisions:
        logger.warning(f"⚠️ {collisions} lexicon surfaces shared by several entities (first kept)")
    return lexicon
