"""
TransE knowledge graph embeddings
Relations are translations: h + r ≈ t, trained with a margin ranking loss
over uniformly corrupted negatives.

Usage:
    from src.knowledge.transe import TransEConfig, train_transe, evaluate_link_prediction

    config = TransEConfig(dim=50, epochs=100, seed=7)
    emb = train_transe(kb.triples, kb.entity_ids, config)
    metrics = evaluate_link_prediction(emb, kb.triples)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from tqdm import tqdm

from src.augmentation.kb import Triple
from src.utils.config import (
    TRANSE_BATCH_SIZE,
    TRANSE_DIM,
    TRANSE_EPOCHS,
    TRANSE_LEARNING_RATE,
    TRANSE_MARGIN,
    TRANSE_NORM,
)
from src.utils.errors import DimensionMismatchError, TrainingDivergenceError, UnknownEntityError

logger = logging.getLogger(__name__)

NORMS = ('L1', 'L2')
MAX_CORRUPTION_ATTEMPTS = 10

TripleLike = Union[Triple, Tuple[str, str, str]]


# ============================================================================
# TYPES
# ============================================================================

@dataclass(frozen=True)
class TransEConfig:
    dim: int = TRANSE_DIM
    margin: float = TRANSE_MARGIN
    learning_rate: float = TRANSE_LEARNING_RATE
    epochs: int = TRANSE_EPOCHS
    batch_size: int = TRANSE_BATCH_SIZE
    norm: str = TRANSE_NORM
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.margin <= 0:
            raise ValueError(f"margin must be > 0, got {self.margin}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs >= 0 and batch_size >= 1 required")
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}, got {self.norm!r}")

    def to_dict(self) -> dict:
        return {
            'dim': self.dim, 'margin': self.margin, 'learning_rate': self.learning_rate,
            'epochs': self.epochs, 'batch_size': self.batch_size, 'norm': self.norm,
            'seed': self.seed,
        }


@dataclass(eq=False)
class EmbeddingTable:
    """
    Entity and relation vectors of one TransE model

    loss_trace holds the mean hinge loss per positive triple for each
    training epoch (empty for tables that were loaded or built by hand).
    """
    entity_vecs: Dict[str, np.ndarray]
    relation_vecs: Dict[str, np.ndarray]
    norm: str = 'L2'
    loss_trace: List[float] = field(default_factory=list)

    def __post_init__(self):
        dims = {v.shape for v in self.entity_vecs.values()} | {v.shape for v in self.relation_vecs.values()}
        if len(dims) > 1:
            raise DimensionMismatchError(f"Embedding vectors have mixed shapes: {sorted(dims)}")
        for key, vec in {**self.entity_vecs, **self.relation_vecs}.items():
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"Non-finite embedding for {key!r}")

    @property
    def dim(self) -> int:
        for vec in self.entity_vecs.values():
            return int(vec.shape[0])
        return 0

    def entity(self, entity_id: str) -> np.ndarray:
        try:
            return self.entity_vecs[entity_id]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    def relation(self, relation: str) -> np.ndarray:
        try:
            return self.relation_vecs[relation]
        except KeyError:
            raise UnknownEntityError(relation, what='relation') from None

    def entity_matrix(self) -> Tuple[List[str], np.ndarray]:
        ids = list(self.entity_vecs)
        return ids, np.vstack([self.entity_vecs[i] for i in ids])


def _as_tuple(triple: TripleLike) -> Tuple[str, str, str]:
    return triple.as_tuple() if isinstance(triple, Triple) else tuple(triple)


# ============================================================================
# SCORING + LOSS
# ============================================================================

def distance(diff: np.ndarray, norm: str) -> np.ndarray:
    """L1 or L2 norm along the last axis"""
    if norm == 'L1':
        return np.abs(diff).sum(axis=-1)
    return np.sqrt((diff * diff).sum(axis=-1))


def _distance_grad(diff: np.ndarray, dist: np.ndarray, norm: str) -> np.ndarray:
    if norm == 'L1':
        return np.sign(diff)
    safe = np.where(dist > 0, dist, 1.0)
    return np.where(dist[:, None] > 0, diff / safe[:, None], 0.0)


def transe_score(emb: EmbeddingTable, triple: TripleLike, norm: Optional[str] = None) -> float:
    """
    ‖h + r − t‖ under the chosen norm; lower is more plausible

    Example:
        h=(1,2), r=(0,1), t=(2,2), L1 -> |1-2| + |3-2| = 2.0
    """
    head, relation, tail = _as_tuple(triple)
    diff = emb.entity(head) + emb.relation(relation) - emb.entity(tail)
    return float(distance(diff, norm or emb.norm))


def margin_loss_and_grad(
    entity_matrix: np.ndarray,
    relation_matrix: np.ndarray,
    positives: np.ndarray,
    negatives: np.ndarray,
    margin: float,
    norm: str,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Summed hinge loss Σ max(0, γ + d(h+r,t) − d(h'+r,t')) and its gradient

    Args:
        entity_matrix: (n_entities, dim)
        relation_matrix: (n_relations, dim)
        positives: (batch, 3) integer (head, relation, tail) rows
        negatives: (batch, 3) corrupted rows paired with positives
        margin: γ
        norm: 'L1' or 'L2'

    Returns:
        (loss, d loss / d entity_matrix, d loss / d relation_matrix)
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 3)
    negatives = np.asarray(negatives, dtype=np.int64).reshape(-1, 3)
    ph, pr, pt = positives.T
    nh, nr, nt = negatives.T

    pos_diff = entity_matrix[ph] + relation_matrix[pr] - entity_matrix[pt]
    neg_diff = entity_matrix[nh] + relation_matrix[nr] - entity_matrix[nt]
    pos_dist = distance(pos_diff, norm)
    neg_dist = distance(neg_diff, norm)

    hinge = margin + pos_dist - neg_dist
    active = hinge > 0
    loss = float(np.maximum(hinge, 0.0).sum())

    grad_e = np.zeros_like(entity_matrix)
    grad_r = np.zeros_like(relation_matrix)
    if not active.any():
        return loss, grad_e, grad_r

    g_pos = _distance_grad(pos_diff[active], pos_dist[active], norm)
    g_neg = _distance_grad(neg_diff[active], neg_dist[active], norm)

    np.add.at(grad_e, ph[active], g_pos)
    np.add.at(grad_e, pt[active], -g_pos)
    np.add.at(grad_r, pr[active], g_pos)
    np.add.at(grad_e, nh[active], -g_neg)
    np.add.at(grad_e, nt[active], g_neg)
    np.add.at(grad_r, nr[active], -g_neg)
    return loss, grad_e, grad_r


def corrupt_triples(
    batch: np.ndarray,
    n_entities: int,
    known: Set[Tuple[int, int, int]],
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Replace head or tail (probability ½ each) with a uniformly drawn entity

    Corruptions that land on a known true triple are redrawn, up to
    MAX_CORRUPTION_ATTEMPTS draws per row.
    """
    negatives = batch.copy()
    rows = np.arange(len(batch))
    column = np.where(rng.random(len(batch)) < 0.5, 0, 2)
    negatives[rows, column] = rng.integers(n_entities, size=len(batch))

    for i in rows:
        attempts = 1
        while attempts < MAX_CORRUPTION_ATTEMPTS and tuple(int(x) for x in negatives[i]) in known:
            negatives[i, column[i]] = rng.integers(n_entities)
            attempts += 1
    return negatives


# ============================================================================
# TRAINING
# ============================================================================

def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / np.where(norms > 0, norms, 1.0)


def _initial_matrices(
    entities: Sequence[str],
    relations: Sequence[str],
    config: TransEConfig,
    rng: np.random.Generator,
    init: Optional[EmbeddingTable],
) -> Tuple[np.ndarray, np.ndarray]:
    if init is not None:
        if init.dim != config.dim:
            raise DimensionMismatchError(f"init table has dim {init.dim}, config wants {config.dim}")
        E = np.vstack([init.entity(e) for e in entities]).astype(float)
        R = np.vstack([init.relation(r) for r in relations]).astype(float)
        return E, R

    bound = 6.0 / np.sqrt(config.dim)
    R = _normalize_rows(rng.uniform(-bound, bound, size=(len(relations), config.dim)))
    E = _normalize_rows(rng.uniform(-bound, bound, size=(len(entities), config.dim)))
    return E, R


def train_transe(
    triples: Iterable[TripleLike],
    entities: Sequence[str],
    config: TransEConfig,
    init: Optional[EmbeddingTable] = None,
    progress: bool = False,
) -> EmbeddingTable:
    """
    Train TransE with minibatch SGD

    Each epoch shuffles the triples, takes one gradient step per minibatch
    and finally rescales every entity vector to unit L2 norm. All
    randomness comes from config.seed.

    Args:
        triples: Training triples (Triple or (head, relation, tail))
        entities: Every entity id to embed
        config: Hyperparameters
        init: Starting table, used as is (otherwise uniform ±6/√dim, normalized)
        progress: Show a tqdm bar over epochs

    Returns:
        EmbeddingTable with loss_trace filled

    Raises:
        UnknownEntityError: a triple endpoint is not in entities
        TrainingDivergenceError: loss became NaN/inf
    """
    triples = [_as_tuple(t) for t in triples]
    if not triples:
        raise ValueError("train_transe needs at least one triple")

    entities = list(dict.fromkeys(entities))
    entity_index = {e: i for i, e in enumerate(entities)}
    relations = list(dict.fromkeys(r for _, r, _ in triples))
    relation_index = {r: i for i, r in enumerate(relations)}

    for h, _, t in triples:
        for endpoint in (h, t):
            if endpoint not in entity_index:
                raise UnknownEntityError(endpoint)

    indexed = np.array(
        [(entity_index[h], relation_index[r], entity_index[t]) for h, r, t in triples],
        dtype=np.int64,
    )
    known = {tuple(int(x) for x in row) for row in indexed}

    rng = np.random.default_rng(config.seed)
    E, R = _initial_matrices(entities, relations, config, rng, init)

    logger.info(
        f"🧠 TransE: {len(entities):,} entities, {len(relations)} relations, "
        f"{len(indexed):,} triples, dim={config.dim}, norm={config.norm}"
    )

    loss_trace = []
    for epoch in tqdm(range(config.epochs), desc='TransE', disable=not progress):
        order = rng.permutation(len(indexed))
        epoch_loss = 0.0
        for batch_no, start in enumerate(range(0, len(order), config.batch_size)):
            positives = indexed[order[start:start + config.batch_size]]
            negatives = corrupt_triples(positives, len(entities), known, rng)
            loss, grad_e, grad_r = margin_loss_and_grad(
                E, R, positives, negatives, config.margin, config.norm
            )
            if not np.isfinite(loss):
                raise TrainingDivergenceError(epoch, batch_no, {
                    'loss': loss,
                    'max_entity_norm': float(np.linalg.norm(E, axis=1).max()),
                    'learning_rate': config.learning_rate,
                })
            E -= config.learning_rate * grad_e
            R -= config.learning_rate * grad_r
            epoch_loss += loss

        E = _normalize_rows(E)
        loss_trace.append(epoch_loss / len(indexed))

    if loss_trace:
        logger.info(f"✅ TransE done: loss {loss_trace[0]:.4f} -> {loss_trace[-1]:.4f}")

    return EmbeddingTable(
        entity_vecs={e: E[i].copy() for i, e in enumerate(entities)},
        relation_vecs={r: R[i].copy() for i, r in enumerate(relations)},
        norm=config.norm,
        loss_trace=loss_trace,
    )


# ============================================================================
# LINK PREDICTION
# ============================================================================

def evaluate_link_prediction(
    emb: EmbeddingTable,
    triples: Iterable[TripleLike],
    norm: Optional[str] = None,
    ks: Sequence[int] = (1, 3, 10),
    filtered: bool = False,
    sides: Sequence[str] = ('head', 'tail'),
    known: Optional[Iterable[TripleLike]] = None,
) -> Dict[str, float]:
    """
    Brute-force ranking of every entity as replacement head and/or tail

    The rank of the true entity is 1 + the number of candidates scoring
    strictly better. In the filtered setting other true triples (the
    evaluated ones plus `known`) are removed from the candidates.

    Returns:
        {'mean_rank', 'mrr', 'hits@k' for each k}
    """
    norm = norm or emb.norm
    triples = [_as_tuple(t) for t in triples]
    true_set = set(triples) | {_as_tuple(t) for t in (known or ())}
    ids, matrix = emb.entity_matrix()
    index = {e: i for i, e in enumerate(ids)}

    ranks = []
    for h, r, t in triples:
        v_h, v_r, v_t = emb.entity(h), emb.relation(r), emb.entity(t)
        if 'tail' in sides:
            scores = distance(v_h + v_r - matrix, norm)
            better = scores < scores[index[t]]
            if filtered:
                better &= np.array([(h, r, e) not in true_set for e in ids])
            ranks.append(1 + int(better.sum()))
        if 'head' in sides:
            scores = distance(matrix + v_r - v_t, norm)
            better = scores < scores[index[h]]
            if filtered:
                better &= np.array([(e, r, t) not in true_set for e in ids])
            ranks.append(1 + int(better.sum()))

    if not ranks:
        raise ValueError("No triples to evaluate")

    ranks = np.array(ranks, dtype=float)
    metrics = {'mean_rank': float(ranks.mean()), 'mrr': float((1.0 / ranks).mean())}
    for k in ks:
        metrics[f'hits@{k}'] = float((ranks <= k).mean())
    return metrics
