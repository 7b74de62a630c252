"""
Knowledge incorporation layer
Fuses word vectors with entity vectors position by position:

    h_i = σ(W_c·w_i + W_e·e_i + b)

Entity vectors are aligned to the first token of each linked mention; every
other position carries a zero entity vector.

Usage:
    from src.knowledge.kim import init_kim_params, kim_fuse, align_entities_to_tokens
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Sequence

import numpy as np

from src.augmentation.linker import EntityMention, Token
from src.utils.config import KIM_ACTIVATION
from src.utils.errors import DimensionMismatchError
from src.utils.io import PathLike
from src.utils.rng import derive_rng

from .transe import EmbeddingTable

logger = logging.getLogger(__name__)

ACTIVATIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    'tanh': np.tanh,
    'relu': lambda x: np.maximum(x, 0.0),
    'identity': lambda x: x,
}


@dataclass(frozen=True, eq=False)
class KimParams:
    """
    Fusion layer weights

    Attributes:
        w_c: (d, d1) word projection
        w_e: (d, d2) entity projection
        b: (d,) bias
        activation: one of ACTIVATIONS
    """
    w_c: np.ndarray
    w_e: np.ndarray
    b: np.ndarray
    activation: str = KIM_ACTIVATION

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation {self.activation!r}; choose from {sorted(ACTIVATIONS)}")
        if self.w_c.ndim != 2 or self.w_e.ndim != 2 or self.b.ndim != 1:
            raise DimensionMismatchError("w_c and w_e must be matrices and b a vector")
        if not (self.w_c.shape[0] == self.w_e.shape[0] == self.b.shape[0]):
            raise DimensionMismatchError(
                f"Output dims disagree: w_c {self.w_c.shape}, w_e {self.w_e.shape}, b {self.b.shape}"
            )
        for name in ('w_c', 'w_e', 'b'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"KimParams.{name} has non-finite entries")

    @property
    def d(self) -> int:
        return int(self.b.shape[0])

    @property
    def d1(self) -> int:
        return int(self.w_c.shape[1])

    @property
    def d2(self) -> int:
        return int(self.w_e.shape[1])


def kim_fuse(word_vecs, entity_vecs, params: KimParams) -> np.ndarray:
    """
    Fuse aligned word and entity vector sequences

    Args:
        word_vecs: (n, d1) array or sequence of d1-vectors
        entity_vecs: (n, d2) array or sequence of d2-vectors
        params: Layer weights

    Returns:
        (n, d) array of fused vectors

    Raises:
        DimensionMismatchError: lengths differ or widths do not match params

    Example:
        d1=d2=d=2, identity weights, b=0, tanh:
        w=(0.5, 0), e=(0.5, 0) -> (tanh(1.0), 0) ≈ (0.76159, 0)
    """
    words = np.asarray(word_vecs, dtype=float)
    ents = np.asarray(entity_vecs, dtype=float)
    if len(words) != len(ents):
        raise DimensionMismatchError(f"{len(words)} word vectors vs {len(ents)} entity vectors")
    if len(words) == 0:
        return np.zeros((0, params.d))

    if words.ndim != 2 or words.shape[1] != params.d1:
        raise DimensionMismatchError(f"word vectors have shape {words.shape}, expected (n, {params.d1})")
    if ents.ndim != 2 or ents.shape[1] != params.d2:
        raise DimensionMismatchError(f"entity vectors have shape {ents.shape}, expected (n, {params.d2})")

    pre = words @ params.w_c.T + ents @ params.w_e.T + params.b
    return ACTIVATIONS[params.activation](pre)


def align_entities_to_tokens(
    tokens: Sequence[Token],
    mentions: Sequence[EntityMention],
    emb: EmbeddingTable,
) -> np.ndarray:
    """
    Entity vector at each mention's first token, zeros elsewhere

    Args:
        tokens: Tokens with character offsets (see src.augmentation.linker.tokenize)
        mentions: Linked mentions over the same text
        emb: Entity embeddings

    Returns:
        (len(tokens), emb.dim) array

    Raises:
        ValueError: a mention does not start on a token boundary
        UnknownEntityError: a mention's entity has no embedding

    Example:
        tokens [right, hand, ganglion, cyst], mention "ganglion cyst"
        -> rows [0, 0, v_E3, 0]
    """
    aligned = np.zeros((len(tokens), emb.dim))
    position = {token.start: i for i, token in enumerate(tokens)}
    for mention in mentions:
        if mention.start not in position:
            raise ValueError(f"Mention {mention.surface!r} at {mention.start} does not start a token")
        aligned[position[mention.start]] = emb.entity(mention.entity_id)
    return aligned


# ============================================================================
# PARAMETER INIT + STORAGE
# ============================================================================

def init_kim_params(d: int, d1: int, d2: int, seed: int, activation: str = KIM_ACTIVATION) -> KimParams:
    """Xavier-uniform weights and a zero bias"""
    rng = derive_rng(seed, 'kim')

    def xavier(fan_out: int, fan_in: int) -> np.ndarray:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=(fan_out, fan_in))

    return KimParams(w_c=xavier(d, d1), w_e=xavier(d, d2), b=np.zeros(d), activation=activation)


def save_kim_params(params: KimParams, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as f:
        np.savez(f, w_c=params.w_c, w_e=params.w_e, b=params.b, activation=np.array(params.activation))
    logger.info(f"💾 Saved: {path}")
    return path


def load_kim_params(path: PathLike) -> KimParams:
    with np.load(path, allow_pickle=False) as data:
        return KimParams(
            w_c=data['w_c'], w_e=data['w_e'], b=data['b'], activation=str(data['activation'])
        )
