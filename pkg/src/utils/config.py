"""
Configuration for the emrQA Toolkit
Centralized paths, defaults and logging setup

Usage:
    from src.utils.config import MAX_ANSWER_TOKENS, HEADER_LEXICON_PATH, setup_logging

Every default below can be overridden from the environment (or a .env file)
with the EMRQA_ prefix, e.g. EMRQA_MAX_ANSWER_TOKENS=30.
"""

from pathlib import Path
import logging
import os
import sys
from typing import Tuple
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# ============================================================================
# PROJECT PATHS (auto-detect from this file's location)
# ============================================================================

# This file is at: src/utils/config.py
# Project root is: ../../ from here
PROJECT_ROOT = Path(__file__).parent.parent.parent

DATA_DIR = PROJECT_ROOT / 'data'
FIXTURES_DIR = DATA_DIR / 'fixtures'        # Synthetic corpus, KB, lexicon
RESOURCES_DIR = PROJECT_ROOT / 'src' / 'resources'
HEADER_LEXICON_PATH = RESOURCES_DIR / 'header_lexicon.txt'


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def parse_ratios(text: str) -> Tuple[float, float, float]:
    """
    Parse a comma-separated train/dev/test ratio string

    Example:
        >>> parse_ratios('0.7,0.1,0.2')
        (0.7, 0.1, 0.2)
    """
    parts = [p.strip() for p in text.split(',') if p.strip()]
    if len(parts) != 3:
        raise ValueError(f"Expected three ratios, got {text!r}")
    return tuple(float(p) for p in parts)


# ============================================================================
# DATASET SETTINGS
# ============================================================================

# Answers with more whitespace tokens than this are filtered out
MAX_ANSWER_TOKENS = _env_int('EMRQA_MAX_ANSWER_TOKENS', 20)

# Document-level train/dev/test proportions
SPLIT_RATIOS = parse_ratios(os.getenv('EMRQA_SPLIT_RATIOS', '0.7,0.1,0.2'))

# Medication / Relation redundancy grids (fractions of QA pairs per note)
MEDICATION_SAMPLE_RATES = (0.05, 0.10, 0.20, 0.40, 0.60)
RELATION_SAMPLE_RATES = (0.01, 0.03, 0.05, 0.10, 0.15)
SAMPLE_RATE_GRIDS = {'medication': MEDICATION_SAMPLE_RATES, 'relation': RELATION_SAMPLE_RATES}

# ============================================================================
# SEGMENTATION SETTINGS
# ============================================================================

HEADER_MAX_TOKENS = _env_int('EMRQA_HEADER_MAX_TOKENS', 6)

# ============================================================================
# KNOWLEDGE SETTINGS (TransE + fusion layer)
# ============================================================================

TRANSE_DIM = _env_int('EMRQA_TRANSE_DIM', 100)
TRANSE_MARGIN = _env_float('EMRQA_TRANSE_MARGIN', 1.0)
TRANSE_LEARNING_RATE = _env_float('EMRQA_TRANSE_LR', 0.01)
TRANSE_EPOCHS = _env_int('EMRQA_TRANSE_EPOCHS', 200)
TRANSE_BATCH_SIZE = _env_int('EMRQA_TRANSE_BATCH_SIZE', 16)
TRANSE_NORM = os.getenv('EMRQA_TRANSE_NORM', 'L2')

KIM_ACTIVATION = os.getenv('EMRQA_KIM_ACTIVATION', 'tanh')
WORD_VECTOR_DIM = _env_int('EMRQA_WORD_DIM', 100)

# Relations a knowledge base file may use
DEFAULT_RELATIONS = frozenset({'synonym_of', 'treats', 'isa', 'caused_by'})

# ============================================================================
# LOGGING
# ============================================================================

LOG_LEVEL = os.getenv('EMRQA_LOG_LEVEL', 'INFO')
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(level: str = None) -> None:
    """
    Configure root logging to stderr with the project format

    Args:
        level: Level name (defaults to EMRQA_LOG_LEVEL)
    """
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


# ============================================================================
# UTILITY: Print configuration (for debugging)
# ============================================================================

def print_config():
    """Print current configuration for debugging"""

    print("=" * 70)
    print("📊 EMRQA TOOLKIT - CONFIGURATION")
    print("=" * 70)

    print("\n📁 Project Paths:")
    print(f"   Root: {PROJECT_ROOT}")
    print(f"   Fixtures: {FIXTURES_DIR}")
    print(f"   Header lexicon: {HEADER_LEXICON_PATH}")

    print("\n📦 Dataset:")
    print(f"   Max answer tokens: {MAX_ANSWER_TOKENS}")
    print(f"   Split ratios: {SPLIT_RATIOS}")

    print("\n🧠 TransE:")
    print(f"   dim={TRANSE_DIM} margin={TRANSE_MARGIN} lr={TRANSE_LEARNING_RATE}")
    print(f"   epochs={TRANSE_EPOCHS} batch={TRANSE_BATCH_SIZE} norm={TRANSE_NORM}")
    print(f"   KIM activation: {KIM_ACTIVATION}")

    print("\n" + "=" * 70)


if __name__ == "__main__":
    print_config()
