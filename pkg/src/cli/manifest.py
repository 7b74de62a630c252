"""
Run manifests
Every CLI run records what it read, what it wrote and how, so the run can be
replayed. Manifests carry no timestamps: replaying a run rewrites an
identical manifest.

Layout:
    single output file  -> <output>.manifest.json
    output directory    -> <output_dir>/manifest.json
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__
from src.utils.errors import DatasetParseError
from src.utils.io import ArtifactSaver, PathLike, read_json, sha256_file

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
MANIFEST_SUFFIX = '.manifest.json'


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    argv: List[str]
    config: Dict[str, Any]
    seed: Optional[int]
    inputs: List[str]
    outputs: List[str]
    tool_version: str = __version__
    input_hashes: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'RunManifest':
        try:
            return cls(**payload)
        except TypeError as e:
            raise DatasetParseError(f"Not a run manifest: {e}") from e


def build_manifest(
    subcommand: str,
    argv: List[str],
    config: Dict[str, Any],
    seed: Optional[int],
    inputs: List[str],
    outputs: List[str],
) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        argv=list(argv),
        config=config,
        seed=seed,
        inputs=list(inputs),
        outputs=list(outputs),
        input_hashes={path: sha256_file(path) for path in inputs},
    )


def manifest_path_for(output: PathLike, is_dir: bool) -> Path:
    output = Path(output)
    if is_dir:
        return output / MANIFEST_NAME
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, path: PathLike) -> Path:
    return ArtifactSaver.save_json(manifest.to_dict(), path)


def load_manifest(path: PathLike) -> RunManifest:
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise DatasetParseError(f"{path}: manifest must be a JSON object")
    return RunManifest.from_dict(payload)


def changed_inputs(manifest: RunManifest) -> List[str]:
    """Inputs whose current content hash differs from the recorded one (or that vanished)"""
    changed = []
    for path, digest in manifest.input_hashes.items():
        if not Path(path).exists() or sha256_file(path) != digest:
            changed.append(path)
    return changed
