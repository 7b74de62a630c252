"""Seeded random streams derived from a base seed plus string keys."""

import hashlib

import numpy as np


def derive_seed(seed: int, *keys: str) -> int:
    """
    64-bit seed from (seed, keys...), stable across processes and platforms

    Example:
        >>> derive_seed(7, 'note-1') == derive_seed(7, 'note-1')
        True
    """
    digest = hashlib.sha256(str(int(seed)).encode('utf-8'))
    for key in keys:
        digest.update(b'\x1f')
        digest.update(str(key).encode('utf-8'))
    return int.from_bytes(digest.digest()[:8], 'big')


def derive_rng(seed: int, *keys: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))
