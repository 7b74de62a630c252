from .pipeline import build_parser, main, replay, run
from .manifest import RunManifest, load_manifest
