"""
Artifact I/O helpers
Deterministic JSON/CSV writers and content hashing shared by every module

Usage:
    from src.utils.io import ArtifactSaver, read_json, sha256_file
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Union

import pandas as pd

from .errors import DatasetParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    """
    Read a UTF-8 JSON file

    Raises:
        DatasetParseError: file is not valid JSON
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"{path}: malformed JSON ({e})") from e


def dumps_json(obj: Any) -> str:
    """Stable JSON text: fixed indentation, UTF-8 kept, trailing newline"""
    return json.dumps(obj, indent=2, ensure_ascii=False) + '\n'


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


# ============================================================================
# ARTIFACT SAVING CLASS
# ============================================================================

class ArtifactSaver:
    """
    Helper class for writing pipeline outputs

    All writers create missing parent directories and produce byte-stable
    files for identical input.

    Examples:
        >>> ArtifactSaver.save_json({'a': 1}, 'out/report.json')
        >>> ArtifactSaver.save_csv(df, 'out/loss.csv')
    """

    @staticmethod
    def save_json(obj: Any, path: PathLike) -> Path:
        """
        Save an object as JSON

        Args:
            obj: JSON-serialisable object (dict insertion order is kept)
            path: Output file

        Returns:
            Path to saved file
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(dumps_json(obj))
        logger.info(f"💾 Saved: {path}")
        return path

    @staticmethod
    def save_csv(df: pd.DataFrame, path: PathLike, **kwargs) -> Path:
        """
        Save DataFrame to CSV

        Args:
            df: DataFrame to save
            path: Output file
            **kwargs: Additional arguments for to_csv()

        Returns:
            Path to saved file
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        # Default to not include index unless specified
        if 'index' not in kwargs:
            kwargs['index'] = False

        df.to_csv(path, lineterminator='\n', **kwargs)
        logger.info(f"💾 Saved: {path}")
        return path

    @staticmethod
    def save_text(text: str, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"💾 Saved: {path}")
        return path
