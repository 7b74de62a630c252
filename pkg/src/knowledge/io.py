"""
Embedding table and loss trace files

Table format (TSV):
    # dim=<d> norm=<L1|L2> entities=<n> relations=<m>
    <entity_id>\t<v1>\t...\t<vd>      (n rows)
    <relation>\t<v1>\t...\t<vd>       (m rows)

Floats are written with repr() so a reload is bit-exact.
"""

import io
import logging
import re
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from src.utils.errors import DatasetParseError
from src.utils.io import ArtifactSaver, PathLike

from .transe import EmbeddingTable

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(r'^# dim=(\d+) norm=(L1|L2) entities=(\d+) relations=(\d+)$')


def save_embedding_table(emb: EmbeddingTable, path: PathLike) -> Path:
    lines = [
        f"# dim={emb.dim} norm={emb.norm} "
        f"entities={len(emb.entity_vecs)} relations={len(emb.relation_vecs)}"
    ]
    for vectors in (emb.entity_vecs, emb.relation_vecs):
        for key, vec in vectors.items():
            lines.append('\t'.join([key, *(repr(float(x)) for x in vec)]))
    return ArtifactSaver.save_text('\n'.join(lines) + '\n', path)


def load_embedding_table(path: PathLike) -> EmbeddingTable:
    """
    Read a table written by save_embedding_table

    Raises:
        DatasetParseError: bad header, row count or width
    """
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().rstrip('\n')
        body = f.read()

    match = HEADER_RE.match(header)
    if not match:
        raise DatasetParseError(f"{path}: bad embedding header {header!r}")
    dim, norm, n_entities, n_relations = int(match[1]), match[2], int(match[3]), int(match[4])

    if body.strip():
        df = pd.read_csv(
            io.StringIO(body), sep='\t', header=None, quoting=3, keep_default_na=False,
            dtype={0: str}, float_precision='round_trip',
        )
    else:
        df = pd.DataFrame(columns=range(dim + 1))

    if len(df) != n_entities + n_relations or df.shape[1] != dim + 1:
        raise DatasetParseError(
            f"{path}: expected {n_entities + n_relations} rows of {dim} values, "
            f"got {len(df)} rows of {df.shape[1] - 1}"
        )

    keys = df.iloc[:, 0].tolist()
    values = df.iloc[:, 1:].to_numpy(dtype=float)
    return EmbeddingTable(
        entity_vecs={keys[i]: values[i] for i in range(n_entities)},
        relation_vecs={keys[i]: values[i] for i in range(n_entities, n_entities + n_relations)},
        norm=norm,
    )


def save_loss_trace(loss_trace: List[float], path: PathLike) -> Path:
    """CSV with columns epoch,loss"""
    df = pd.DataFrame({'epoch': np.arange(len(loss_trace)), 'loss': loss_trace})
    return ArtifactSaver.save_csv(df, path)


def load_loss_trace(path: PathLike) -> List[float]:
    df = pd.read_csv(path, float_precision='round_trip')
    return df.sort_values('epoch')['loss'].astype(float).tolist()
