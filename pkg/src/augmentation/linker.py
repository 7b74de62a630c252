"""
Dictionary entity linker
Greedy longest-match over word tokens, left to right, case-insensitive
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, NamedTuple, Tuple, Union

TOKEN_RE = re.compile(r'\w+|[^\w\s]')


class Token(NamedTuple):
    text: str
    start: int
    end: int


def tokenize(text: str) -> List[Token]:
    """
    Word and punctuation tokens with character offsets

    Example:
        >>> [t.text for t in tokenize('on Flagyl?')]
        ['on', 'Flagyl', '?']
    """
    return [Token(m.group(), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class EntityMention:
    surface: str
    entity_id: str
    start: int
    end: int


class EntityLinker:
    """
    Longest-match linker over a surface -> entity_id lexicon

    Lexicon surfaces are matched token by token, so a match always starts
    and ends on token boundaries ("cyst" never matches inside "cystitis").
    """

    def __init__(self, lexicon: Mapping[str, str]):
        self.index: Dict[Tuple[str, ...], str] = {}
        for surface, entity_id in lexicon.items():
            key = tuple(t.text.lower() for t in tokenize(surface))
            if key:
                self.index.setdefault(key, entity_id)
        self.max_len = max((len(k) for k in self.index), default=0)

    def link(self, text: str) -> List[EntityMention]:
        tokens = tokenize(text)
        lowered = [t.text.lower() for t in tokens]
        mentions = []
        i = 0
        while i < len(tokens):
            for length in range(min(self.max_len, len(tokens) - i), 0, -1):
                entity_id = self.index.get(tuple(lowered[i:i + length]))
                if entity_id is not None:
                    start, end = tokens[i].start, tokens[i + length - 1].end
                    mentions.append(EntityMention(text[start:end], entity_id, start, end))
                    i += length
                    break
            else:
                i += 1
        return mentions


def link_entities(text: str, lexicon: Union[Mapping[str, str], EntityLinker]) -> List[EntityMention]:
    """
    Find non-overlapping lexicon mentions in a text

    Args:
        text: Question or context text
        lexicon: {lowercase surface: entity_id} or a prepared EntityLinker

    Returns:
        Mentions in text order (empty when nothing matches)

    Example:
        >>> link_entities('right hand ganglion cyst', {'ganglion': 'E2', 'ganglion cyst': 'E3'})
        [EntityMention(surface='ganglion cyst', entity_id='E3', start=11, end=24)]
    """
    linker = lexicon if isinstance(lexicon, EntityLinker) else EntityLinker(lexicon)
    return linker.link(text)
