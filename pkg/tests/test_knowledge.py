"""
Tests for TransE training, link prediction, the fusion layer and vector I/O
"""

import numpy as np
import pytest

from src.augmentation import EntityMention, link_entities, tokenize
from src.knowledge import (
    EmbeddingTable,
    KimParams,
    TransEConfig,
    WordVectors,
    align_entities_to_tokens,
    evaluate_link_prediction,
    init_kim_params,
    kim_fuse,
    load_embedding_table,
    load_kim_params,
    load_loss_trace,
    margin_loss_and_grad,
    save_embedding_table,
    save_kim_params,
    save_loss_trace,
    train_transe,
    transe_score,
)
from src.utils.errors import DimensionMismatchError, TrainingDivergenceError, UnknownEntityError


def _table(entities, relations, norm='L2'):
    return EmbeddingTable(
        entity_vecs={k: np.array(v, dtype=float) for k, v in entities.items()},
        relation_vecs={k: np.array(v, dtype=float) for k, v in relations.items()},
        norm=norm,
    )


@pytest.fixture
def square():
    """Four unit vectors and a relation mapping a onto b exactly"""
    return _table(
        {'a': (1, 0), 'b': (0, 1), 'c': (-1, 0), 'd': (0, -1)},
        {'r': (-1, 1)},
    )


@pytest.fixture(scope='module')
def chain():
    """20 entities linked by next/prev"""
    entities = [f"e{i:02d}" for i in range(20)]
    triples = []
    for left, right in zip(entities, entities[1:]):
        triples.append((left, 'next', right))
        triples.append((right, 'prev', left))
    return entities, triples


@pytest.fixture(scope='module')
def chain_model(chain):
    entities, triples = chain
    return train_transe(triples, entities, TransEConfig(seed=0))


# ============================================================================
# SCORING
# ============================================================================

def test_transe_score_examples():
    emb = _table({'h': (0, 0), 't': (1, 0), 'o': (0, 0)}, {'r': (1, 0)})
    assert transe_score(emb, ('h', 'r', 't')) == 0.0
    assert transe_score(emb, ('h', 'r', 'o')) == 1.0

    emb = _table({'h': (1, 2), 't': (2, 2)}, {'r': (0, 1)})
    assert transe_score(emb, ('h', 'r', 't'), norm='L1') == 2.0


def test_transe_score_unknown_ids(square):
    with pytest.raises(UnknownEntityError):
        transe_score(square, ('a', 'r', 'zzz'))
    with pytest.raises(UnknownEntityError):
        transe_score(square, ('a', 'missing', 'b'))


@pytest.mark.parametrize('kwargs', [
    {'dim': 0}, {'margin': 0.0}, {'learning_rate': 0.0}, {'norm': 'L3'}, {'batch_size': 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        TransEConfig(**kwargs)


# ============================================================================
# GRADIENT
# ============================================================================

def _dist(x, norm):
    return np.abs(x).sum(axis=1) if norm == 'L1' else np.linalg.norm(x, axis=1)


def _random_instance(rng, norm, margin=2.0):
    """5 entities, 2 relations, 3 positive/negative pairs away from every kink"""
    while True:
        E = rng.normal(size=(5, 4))
        R = rng.normal(size=(2, 4))
        positives = np.column_stack([rng.integers(5, size=3), rng.integers(2, size=3), rng.integers(5, size=3)])
        negatives = positives.copy()
        negatives[:, 2] = (negatives[:, 2] + rng.integers(1, 5, size=3)) % 5

        pos = E[positives[:, 0]] + R[positives[:, 1]] - E[positives[:, 2]]
        neg = E[negatives[:, 0]] + R[negatives[:, 1]] - E[negatives[:, 2]]
        pos_dist, neg_dist = _dist(pos, norm), _dist(neg, norm)
        hinge = margin + pos_dist - neg_dist
        if np.abs(hinge).min() < 1e-3 or min(pos_dist.min(), neg_dist.min()) < 1e-3:
            continue
        if norm == 'L1' and min(np.abs(pos).min(), np.abs(neg).min()) < 1e-3:
            continue
        if not (hinge > 0).any():
            continue
        return E, R, positives, negatives, margin


@pytest.mark.parametrize('norm', ['L2', 'L1'])
def test_gradient_matches_finite_differences(norm):
    rng = np.random.default_rng(0)
    eps = 1e-6
    worst = 0.0
    for _ in range(100):
        E, R, positives, negatives, margin = _random_instance(rng, norm)
        _, grad_e, grad_r = margin_loss_and_grad(E, R, positives, negatives, margin, norm)

        use_entities = rng.random() < 0.5
        target, grad = (E, grad_e) if use_entities else (R, grad_r)
        row, col = int(rng.integers(target.shape[0])), int(rng.integers(target.shape[1]))

        original = target[row, col]
        target[row, col] = original + eps
        plus = margin_loss_and_grad(E, R, positives, negatives, margin, norm)[0]
        target[row, col] = original - eps
        minus = margin_loss_and_grad(E, R, positives, negatives, margin, norm)[0]
        target[row, col] = original

        numeric = (plus - minus) / (2 * eps)
        analytic = grad[row, col]
        error = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-3)
        worst = max(worst, error)
    assert worst < 1e-4


def test_inactive_pairs_have_zero_gradient():
    E = np.eye(3)
    R = np.zeros((1, 3))
    loss, grad_e, grad_r = margin_loss_and_grad(E, R, [[0, 0, 0]], [[0, 0, 1]], margin=0.5, norm='L2')
    assert loss == 0.0
    assert not grad_e.any() and not grad_r.any()


# ============================================================================
# TRAINING
# ============================================================================

def test_zero_loss_init_stays_put(square):
    config = TransEConfig(dim=2, margin=1.0, epochs=5, batch_size=16, seed=0)
    trained = train_transe([('a', 'r', 'b')], ['a', 'b', 'c', 'd'], config, init=square)

    assert trained.loss_trace == [0.0] * 5
    for key, vec in square.entity_vecs.items():
        assert np.array_equal(trained.entity(key), vec)
    assert np.array_equal(trained.relation('r'), square.relation('r'))


def test_chain_training_descends_and_ranks(chain, chain_model):
    _, triples = chain
    assert len(chain_model.loss_trace) == 200
    assert chain_model.loss_trace[-1] < chain_model.loss_trace[0]
    assert all(loss >= 0 for loss in chain_model.loss_trace)

    metrics = evaluate_link_prediction(chain_model, triples, sides=('tail',))
    assert metrics['hits@10'] >= 0.9


def test_entities_are_unit_norm_after_training(chain_model):
    for vec in chain_model.entity_vecs.values():
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-6


def test_training_is_deterministic(chain):
    entities, triples = chain
    config = TransEConfig(dim=8, epochs=5, seed=3)
    first = train_transe(triples, entities, config)
    second = train_transe(triples, entities, config)

    for key in first.entity_vecs:
        assert np.array_equal(first.entity(key), second.entity(key))
    for key in first.relation_vecs:
        assert np.array_equal(first.relation(key), second.relation(key))
    assert first.loss_trace == second.loss_trace


def test_divergence_is_reported(chain):
    entities, triples = chain
    config = TransEConfig(dim=4, epochs=3, batch_size=4, learning_rate=1e308, seed=0)
    with np.errstate(all='ignore'):
        with pytest.raises(TrainingDivergenceError) as err:
            train_transe(triples, entities, config)
    assert 'loss' in err.value.diagnostics


def test_training_input_errors():
    with pytest.raises(ValueError):
        train_transe([], ['a'], TransEConfig(dim=2))
    with pytest.raises(UnknownEntityError):
        train_transe([('a', 'r', 'b')], ['a'], TransEConfig(dim=2))


def test_kb_triples_train(kb):
    emb = train_transe(kb.triples, kb.entity_ids, TransEConfig(dim=8, epochs=3, seed=1))
    assert set(emb.entity_vecs) == set(kb.entity_ids)
    assert set(emb.relation_vecs) == {'treats', 'isa', 'caused_by', 'synonym_of'}


# ============================================================================
# LINK PREDICTION
# ============================================================================

def test_link_prediction_on_exact_embedding(square):
    metrics = evaluate_link_prediction(square, [('a', 'r', 'b')])
    assert metrics == {'mean_rank': 1.0, 'mrr': 1.0, 'hits@1': 1.0, 'hits@3': 1.0, 'hits@10': 1.0}


def test_filtered_setting_skips_other_true_triples(square):
    triples = [('a', 'r', 'b'), ('a', 'r', 'a')]
    raw = evaluate_link_prediction(square, triples, sides=('tail',))
    filtered = evaluate_link_prediction(square, triples, sides=('tail',), filtered=True)

    assert raw['mean_rank'] == 1.5
    assert filtered['mean_rank'] == 1.0


# ============================================================================
# FUSION LAYER
# ============================================================================

def test_fuse_identity_returns_word_vectors():
    rng = np.random.default_rng(5)
    words = rng.normal(size=(6, 3))
    params = KimParams(w_c=np.eye(3), w_e=rng.normal(size=(3, 4)), b=np.zeros(3), activation='identity')

    fused = kim_fuse(words, np.zeros((6, 4)), params)
    assert np.array_equal(fused, words)


def test_fuse_tanh_hand_case():
    params = KimParams(w_c=np.eye(2), w_e=np.eye(2), b=np.zeros(2), activation='tanh')
    fused = kim_fuse([[0.5, 0.0]], [[0.5, 0.0]], params)
    assert fused[0, 0] == pytest.approx(0.7615941559557649, abs=1e-9)
    assert fused[0, 1] == pytest.approx(0.0, abs=1e-9)


def test_fuse_empty_and_linear():
    params = init_kim_params(d=3, d1=2, d2=4, seed=1, activation='identity')
    assert kim_fuse([], [], params).shape == (0, 3)

    rng = np.random.default_rng(2)
    words, ents = rng.normal(size=(5, 2)), rng.normal(size=(5, 4))
    np.testing.assert_allclose(kim_fuse(2.5 * words, 2.5 * ents, params), 2.5 * kim_fuse(words, ents, params))


def test_relu_clips_negatives():
    params = KimParams(w_c=-np.eye(2), w_e=np.zeros((2, 1)), b=np.zeros(2), activation='relu')
    assert np.array_equal(kim_fuse([[1.0, -2.0]], [[0.0]], params), np.array([[0.0, 2.0]]))


def test_fuse_dimension_errors():
    params = init_kim_params(d=3, d1=2, d2=4, seed=1)
    with pytest.raises(DimensionMismatchError):
        kim_fuse(np.zeros((2, 2)), np.zeros((3, 4)), params)
    with pytest.raises(DimensionMismatchError):
        kim_fuse(np.zeros((2, 5)), np.zeros((2, 4)), params)
    with pytest.raises(DimensionMismatchError):
        KimParams(w_c=np.zeros((3, 2)), w_e=np.zeros((2, 4)), b=np.zeros(3))


def test_init_kim_params(tmp_path):
    params = init_kim_params(d=6, d1=4, d2=8, seed=9)
    assert params.w_c.shape == (6, 4) and params.w_e.shape == (6, 8)
    assert not params.b.any()
    assert np.abs(params.w_c).max() <= np.sqrt(6.0 / 10)
    assert np.array_equal(params.w_e, init_kim_params(d=6, d1=4, d2=8, seed=9).w_e)

    loaded = load_kim_params(save_kim_params(params, tmp_path / 'kim.npz'))
    assert loaded.activation == params.activation
    assert np.array_equal(loaded.w_c, params.w_c)


# ============================================================================
# ALIGNMENT + WORD VECTORS
# ============================================================================

def test_alignment_uses_the_first_token():
    emb = _table({'E3': (0.6, 0.8), 'E2': (1.0, 0.0)}, {'isa': (0.0, 0.0)})
    text = 'right hand ganglion cyst'
    mentions = link_entities(text, {'ganglion': 'E2', 'ganglion cyst': 'E3'})

    aligned = align_entities_to_tokens(tokenize(text), mentions, emb)
    assert np.array_equal(aligned, np.array([[0, 0], [0, 0], [0.6, 0.8], [0, 0]]))
    assert not align_entities_to_tokens(tokenize(text), [], emb).any()


def test_alignment_of_two_mentions_and_errors(lexicon):
    emb = _table({'E1': (1.0, 0.0), 'E2': (0.0, 1.0)}, {'isa': (0.0, 0.0)})
    text = 'Flagyl and Lasix'
    mentions = link_entities(text, lexicon)
    aligned = align_entities_to_tokens(tokenize(text), mentions, emb)
    assert int(np.count_nonzero(aligned.any(axis=1))) == 2

    with pytest.raises(UnknownEntityError):
        align_entities_to_tokens(tokenize('Tylenol'), link_entities('Tylenol', lexicon), emb)

    shifted = [EntityMention('lagyl', 'E1', 1, 6)]
    with pytest.raises(ValueError):
        align_entities_to_tokens(tokenize(text), shifted, emb)


def test_word_vectors_do_not_depend_on_vocabulary():
    a = WordVectors.random(dim=8, seed=3)
    b = WordVectors.random(dim=8, seed=3)
    assert np.array_equal(a.vector('Flagyl'), b.embed(['lasix', 'flagyl'])[1])
    assert not np.array_equal(a.vector('flagyl'), WordVectors.random(dim=8, seed=4).vector('flagyl'))


def test_word_vectors_from_tsv(tmp_path):
    path = tmp_path / 'words.tsv'
    path.write_text('flagyl\t0.5\t-1.25\nlasix\t1.0\t2.0\n', encoding='utf-8')

    wv = WordVectors.from_tsv(path)
    assert wv.dim == 2
    assert np.array_equal(wv.vector('Flagyl'), np.array([0.5, -1.25]))
    assert not wv.vector('unknown').any()


# ============================================================================
# FILES
# ============================================================================

def test_embedding_table_file(chain_model, tmp_path):
    path = save_embedding_table(chain_model, tmp_path / 'emb.tsv')
    header = path.read_text(encoding='utf-8').splitlines()[0]
    assert header == '# dim=100 norm=L2 entities=20 relations=2'

    loaded = load_embedding_table(path)
    assert list(loaded.entity_vecs) == list(chain_model.entity_vecs)
    for key, vec in chain_model.entity_vecs.items():
        assert np.array_equal(loaded.entity(key), vec)
    assert np.array_equal(loaded.relation('prev'), chain_model.relation('prev'))


def test_loss_trace_file(chain_model, tmp_path):
    path = save_loss_trace(chain_model.loss_trace, tmp_path / 'loss.csv')
    assert path.read_text(encoding='utf-8').splitlines()[0] == 'epoch,loss'
    assert load_loss_trace(path) == chain_model.loss_trace
